//! Print the four communication-cost tables, symbolic and evaluated.

use remoteop::resources::{generate_tables, render_tables, TableFormat};

fn main() {
    let tables = generate_tables();
    print!("{}", render_tables(&tables, TableFormat::Text, Some((2, 1))));
}
