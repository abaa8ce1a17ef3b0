//! Communication costs as affine expressions in N and M, scenario
//! conversions, gap rows, and the four summary tables.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol::ResourceVector;

/// Integer affine expression c0 + cN*N + cM*M.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Affine {
    pub c0: i64,
    pub cn: i64,
    pub cm: i64,
}

impl Affine {
    pub const ZERO: Affine = Affine { c0: 0, cn: 0, cm: 0 };

    pub fn constant(c0: i64) -> Self {
        Affine { c0, cn: 0, cm: 0 }
    }

    pub fn new(c0: i64, cn: i64, cm: i64) -> Self {
        Affine { c0, cn, cm }
    }

    pub fn eval(&self, n: i64, m: i64) -> i64 {
        self.c0 + self.cn * n + self.cm * m
    }

    pub fn is_zero(&self) -> bool {
        *self == Affine::ZERO
    }

    pub fn scale(&self, k: i64) -> Self {
        Affine {
            c0: self.c0 * k,
            cn: self.cn * k,
            cm: self.cm * k,
        }
    }
}

impl Add for Affine {
    type Output = Affine;
    fn add(self, rhs: Affine) -> Affine {
        Affine {
            c0: self.c0 + rhs.c0,
            cn: self.cn + rhs.cn,
            cm: self.cm + rhs.cm,
        }
    }
}

impl Sub for Affine {
    type Output = Affine;
    fn sub(self, rhs: Affine) -> Affine {
        self + (-rhs)
    }
}

impl Neg for Affine {
    type Output = Affine;
    fn neg(self) -> Affine {
        self.scale(-1)
    }
}

/// Canonical rendering: N term, then M term, then constant; no spaces,
/// unit coefficients omitted, zero terms omitted, "0" when empty.
impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let mut push = |coef: i64, sym: &str| {
            if coef == 0 {
                return;
            }
            if coef > 0 && !out.is_empty() {
                out.push('+');
            }
            if coef == -1 && !sym.is_empty() {
                out.push('-');
            } else if coef != 1 || sym.is_empty() {
                out.push_str(&coef.to_string());
            }
            out.push_str(sym);
        };
        push(self.cn, "N");
        push(self.cm, "M");
        push(self.c0, "");
        if out.is_empty() {
            out.push('0');
        }
        write!(f, "{out}")
    }
}

impl Serialize for Affine {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Directional affine counters mirroring `ResourceVector`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AffineCost {
    pub qudits_b_to_a: Affine,
    pub qudits_a_to_b: Affine,
    pub cbits_b_to_a: Affine,
    pub cbits_a_to_b: Affine,
    pub ebits: Affine,
}

impl AffineCost {
    pub fn total_qudits(&self) -> Affine {
        self.qudits_b_to_a + self.qudits_a_to_b
    }

    pub fn total_cbits(&self) -> Affine {
        self.cbits_b_to_a + self.cbits_a_to_b
    }

    pub fn sub(&self, rhs: &AffineCost) -> AffineCost {
        AffineCost {
            qudits_b_to_a: self.qudits_b_to_a - rhs.qudits_b_to_a,
            qudits_a_to_b: self.qudits_a_to_b - rhs.qudits_a_to_b,
            cbits_b_to_a: self.cbits_b_to_a - rhs.cbits_b_to_a,
            cbits_a_to_b: self.cbits_a_to_b - rhs.cbits_a_to_b,
            ebits: self.ebits - rhs.ebits,
        }
    }

    /// Concrete counters at (N, M). Errors if any counter comes out negative.
    pub fn eval(&self, n: i64, m: i64) -> Result<ResourceVector> {
        let get = |a: Affine, name: &str| -> Result<u64> {
            let v = a.eval(n, m);
            u64::try_from(v).map_err(|_| {
                Error::Domain(format!("{name} evaluates to {v} < 0 at N={n}, M={m}"))
            })
        };
        Ok(ResourceVector {
            qudits_b_to_a: get(self.qudits_b_to_a, "qudits_b_to_a")?,
            qudits_a_to_b: get(self.qudits_a_to_b, "qudits_a_to_b")?,
            cbits_b_to_a: get(self.cbits_b_to_a, "cbits_b_to_a")?,
            cbits_a_to_b: get(self.cbits_a_to_b, "cbits_a_to_b")?,
            ebits: get(self.ebits, "ebits")?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    QubitTransmission,
    SharedEntanglement,
}

/// Cost of a protocol in one communication scenario. Qubit-transmission
/// costs carry no ebits; shared-entanglement costs carry no qubit transfers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScenarioCost {
    pub scenario: Scenario,
    pub cost: AffineCost,
}

impl ScenarioCost {
    pub fn qubit_transmission(cost: AffineCost) -> Result<Self> {
        if !cost.ebits.is_zero() {
            return Err(Error::Scenario(
                "qubit-transmission cost cannot carry ebits".into(),
            ));
        }
        Ok(Self {
            scenario: Scenario::QubitTransmission,
            cost,
        })
    }

    pub fn shared_entanglement(cost: AffineCost) -> Result<Self> {
        if !cost.qudits_b_to_a.is_zero() || !cost.qudits_a_to_b.is_zero() {
            return Err(Error::Scenario(
                "shared-entanglement cost cannot carry qubit transmissions".into(),
            ));
        }
        Ok(Self {
            scenario: Scenario::SharedEntanglement,
            cost,
        })
    }
}

/// Simulate a qubit-transmission protocol with teleportation: each
/// transmitted qubit becomes 1 shared ebit plus 2 cbits in its direction
/// of travel.
pub fn to_shared_entanglement(cost: &ScenarioCost) -> Result<ScenarioCost> {
    if cost.scenario != Scenario::QubitTransmission {
        return Err(Error::Scenario(
            "input is already a shared-entanglement cost".into(),
        ));
    }
    let c = &cost.cost;
    ScenarioCost::shared_entanglement(AffineCost {
        qudits_b_to_a: Affine::ZERO,
        qudits_a_to_b: Affine::ZERO,
        cbits_b_to_a: c.cbits_b_to_a + c.qudits_b_to_a.scale(2),
        cbits_a_to_b: c.cbits_a_to_b + c.qudits_a_to_b.scale(2),
        ebits: c.total_qudits(),
    })
}

/// Replace each pre-shared ebit by the transmission of one half of a
/// locally prepared pair; cbits are unchanged. The distributing party is
/// taken to be Bob.
pub fn to_qubit_transmission(cost: &ScenarioCost) -> Result<ScenarioCost> {
    if cost.scenario != Scenario::SharedEntanglement {
        return Err(Error::Scenario(
            "input is already a qubit-transmission cost".into(),
        ));
    }
    let c = &cost.cost;
    ScenarioCost::qubit_transmission(AffineCost {
        qudits_b_to_a: c.ebits,
        qudits_a_to_b: Affine::ZERO,
        cbits_b_to_a: c.cbits_b_to_a,
        cbits_a_to_b: c.cbits_a_to_b,
        ebits: Affine::ZERO,
    })
}

/// Resources of the upper protocol minus those of the lower, per counter.
pub fn gap(upper: &ScenarioCost, lower: &ScenarioCost) -> Result<AffineCost> {
    if upper.scenario != lower.scenario {
        return Err(Error::Scenario(
            "gap requires both costs in the same scenario".into(),
        ));
    }
    Ok(upper.cost.sub(&lower.cost))
}

fn qt(q_ba: Affine, q_ab: Affine, c_ba: Affine, c_ab: Affine) -> ScenarioCost {
    ScenarioCost::qubit_transmission(AffineCost {
        qudits_b_to_a: q_ba,
        qudits_a_to_b: q_ab,
        cbits_b_to_a: c_ba,
        cbits_a_to_b: c_ab,
        ebits: Affine::ZERO,
    })
    .expect("ebits are zero")
}

fn se(ebits: Affine, c_ba: Affine, c_ab: Affine) -> ScenarioCost {
    ScenarioCost::shared_entanglement(AffineCost {
        qudits_b_to_a: Affine::ZERO,
        qudits_a_to_b: Affine::ZERO,
        cbits_b_to_a: c_ba,
        cbits_a_to_b: c_ab,
        ebits,
    })
    .expect("qubit transfers are zero")
}

const N: Affine = Affine { c0: 0, cn: 1, cm: 0 };
const M: Affine = Affine { c0: 0, cn: 0, cm: 1 };

/// Remote restricted operation, split layout: N qubits travel to Alice,
/// N cbits travel back.
pub fn our_split_cost() -> ScenarioCost {
    qt(N, Affine::ZERO, Affine::ZERO, N)
}

/// Remote restricted operation when Bob starts with everything: the block
/// qudits travel with the ancillas and come home afterwards.
pub fn our_bob_holds_all_cost() -> ScenarioCost {
    qt(N + M, M, Affine::ZERO, N)
}

/// Multi-controlled-U without prior entanglement.
pub fn yang_cost() -> ScenarioCost {
    qt(Affine::constant(1), Affine::ZERO, Affine::ZERO, Affine::constant(1))
}

/// Send everything over, apply, send everything back.
pub fn simple_swap_cost() -> ScenarioCost {
    qt(N + M, N + M, Affine::ZERO, Affine::ZERO)
}

/// Bidirectional teleportation of all N + M qubits.
pub fn bqst_cost() -> ScenarioCost {
    se((N + M).scale(2), (N + M).scale(2), (N + M).scale(2))
}

fn prior_ejpp00() -> ScenarioCost {
    se(Affine::constant(1), Affine::constant(1), Affine::constant(1))
}

fn prior_w06() -> ScenarioCost {
    se(N, N, N)
}

fn prior_zw07() -> ScenarioCost {
    se(N + M.scale(2), N + M.scale(2), N + M.scale(2))
}

fn prior_zw08() -> ScenarioCost {
    se(N, N, N)
}

/// One protocol row with its cost in both scenarios (aggregated over
/// directions, as the summary tables present them).
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub protocol: String,
    pub qt_qubits: Affine,
    pub qt_cbits: Affine,
    pub se_ebits: Affine,
    pub se_cbits: Affine,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapRow {
    pub qt_cbits: Affine,
    pub se_cbits: Affine,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub table_id: u32,
    pub caption: String,
    pub rows: Vec<TableRow>,
    pub gaps: GapRow,
}

fn both_scenarios(native: &ScenarioCost) -> Result<(ScenarioCost, ScenarioCost)> {
    match native.scenario {
        Scenario::QubitTransmission => Ok((*native, to_shared_entanglement(native)?)),
        Scenario::SharedEntanglement => Ok((to_qubit_transmission(native)?, *native)),
    }
}

fn make_row(name: &str, native: &ScenarioCost) -> Result<TableRow> {
    let (qt_cost, se_cost) = both_scenarios(native)?;
    Ok(TableRow {
        protocol: name.to_string(),
        qt_qubits: qt_cost.cost.total_qudits(),
        qt_cbits: qt_cost.cost.total_cbits(),
        se_ebits: se_cost.cost.ebits,
        se_cbits: se_cost.cost.total_cbits(),
    })
}

fn make_table(
    table_id: u32,
    caption: &str,
    upper: (&str, &ScenarioCost),
    lower: (&str, &ScenarioCost),
) -> Result<Table> {
    let rows = vec![make_row(upper.0, upper.1)?, make_row(lower.0, lower.1)?];
    let (u_qt, u_se) = both_scenarios(upper.1)?;
    let (l_qt, l_se) = both_scenarios(lower.1)?;
    let gaps = GapRow {
        qt_cbits: gap(&u_qt, &l_qt)?.total_cbits(),
        se_cbits: gap(&u_se, &l_se)?.total_cbits(),
    };
    Ok(Table {
        table_id,
        caption: caption.to_string(),
        rows,
        gaps,
    })
}

/// The four communication-cost summary tables, symbolic in N and M.
pub fn generate_tables() -> Vec<Table> {
    vec![
        make_table(
            1,
            "N-qubit controlled-U operation with Bob's N-1 control qubits and Alice's 1 target qubit",
            ("Protocol in Ref. [EJPP00]", &prior_ejpp00()),
            ("Protocol in Ref. [Y08]", &yang_cost()),
        )
        .expect("table 1 is well-formed"),
        make_table(
            2,
            "Alice's (N+M)-qubit operation on Bob's N qubits and Alice's M qubits",
            ("Protocol in Ref. [ZW08]", &prior_zw08()),
            ("Our protocol", &our_split_cost()),
        )
        .expect("table 2 is well-formed"),
        make_table(
            3,
            "Alice's (N+M)-qubit operation on Bob's N+M qubits",
            ("Protocol in Ref. [ZW07]", &prior_zw07()),
            ("Our protocol", &our_bob_holds_all_cost()),
        )
        .expect("table 3 is well-formed"),
        make_table(
            4,
            "Alice's N-qubit operation on Bob's N qubits",
            ("Protocol in Ref. [W06]", &prior_w06()),
            ("Our protocol", &our_split_cost()),
        )
        .expect("table 4 is well-formed"),
    ]
}

/// A table with every cell evaluated at concrete (N, M).
#[derive(Debug, Clone, Serialize)]
pub struct EvaluatedTable {
    pub table_id: u32,
    pub n: i64,
    pub m: i64,
    pub rows: Vec<(String, [i64; 4])>,
    pub gaps: [i64; 2],
}

impl Table {
    pub fn evaluate(&self, n: i64, m: i64) -> EvaluatedTable {
        EvaluatedTable {
            table_id: self.table_id,
            n,
            m,
            rows: self
                .rows
                .iter()
                .map(|r| {
                    (
                        r.protocol.clone(),
                        [
                            r.qt_qubits.eval(n, m),
                            r.qt_cbits.eval(n, m),
                            r.se_ebits.eval(n, m),
                            r.se_cbits.eval(n, m),
                        ],
                    )
                })
                .collect(),
            gaps: [self.gaps.qt_cbits.eval(n, m), self.gaps.se_cbits.eval(n, m)],
        }
    }
}

/// Output format for the table report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Json,
    Csv,
}

fn render_text(tables: &[Table], eval: Option<(i64, i64)>) -> String {
    let mut out = String::new();
    for t in tables {
        out.push_str(&format!("Table {}: {}\n", t.table_id, t.caption));
        let width = t
            .rows
            .iter()
            .map(|r| r.protocol.len())
            .max()
            .unwrap_or(0)
            .max("Gap".len());
        out.push_str(&format!(
            "{:width$}  {:>8} {:>8} | {:>8} {:>8}\n",
            "",
            "qubits",
            "cbits",
            "ebits",
            "cbits",
            width = width
        ));
        for r in &t.rows {
            out.push_str(&format!(
                "{:width$}  {:>8} {:>8} | {:>8} {:>8}\n",
                r.protocol,
                r.qt_qubits.to_string(),
                r.qt_cbits.to_string(),
                r.se_ebits.to_string(),
                r.se_cbits.to_string(),
                width = width
            ));
        }
        out.push_str(&format!(
            "{:width$}  {:>8} {:>8} | {:>8} {:>8}\n",
            "Gap",
            "",
            t.gaps.qt_cbits.to_string(),
            "",
            t.gaps.se_cbits.to_string(),
            width = width
        ));
        if let Some((n, m)) = eval {
            let e = t.evaluate(n, m);
            out.push_str(&format!("  evaluated at N={n}, M={m}:\n"));
            for (name, cells) in &e.rows {
                out.push_str(&format!(
                    "  {name:width$}  {:>6} {:>6} | {:>6} {:>6}\n",
                    cells[0], cells[1], cells[2], cells[3]
                ));
            }
            out.push_str(&format!(
                "  {:width$}  {:>6} {:>6} | {:>6} {:>6}\n",
                "Gap", "", e.gaps[0], "", e.gaps[1]
            ));
        }
        out.push('\n');
    }
    out
}

fn render_json(tables: &[Table], eval: Option<(i64, i64)>) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        version: u32,
        tables: &'a [Table],
        #[serde(skip_serializing_if = "Option::is_none")]
        evaluated: Option<Vec<EvaluatedTable>>,
    }
    let evaluated = eval.map(|(n, m)| tables.iter().map(|t| t.evaluate(n, m)).collect());
    serde_json::to_string_pretty(&Doc {
        version: 1,
        tables,
        evaluated,
    })
    .expect("serialization cannot fail")
}

fn render_csv(tables: &[Table], eval: Option<(i64, i64)>) -> String {
    let mut out = String::from("table_id,protocol,qt_qubits,qt_cbits,se_ebits,se_cbits\n");
    for t in tables {
        for r in &t.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                t.table_id, r.protocol, r.qt_qubits, r.qt_cbits, r.se_ebits, r.se_cbits
            ));
        }
        out.push_str(&format!(
            "{},Gap,,{},,{}\n",
            t.table_id, t.gaps.qt_cbits, t.gaps.se_cbits
        ));
        if let Some((n, m)) = eval {
            let e = t.evaluate(n, m);
            for (name, cells) in &e.rows {
                out.push_str(&format!(
                    "{},{} (N={n} M={m}),{},{},{},{}\n",
                    t.table_id, name, cells[0], cells[1], cells[2], cells[3]
                ));
            }
        }
    }
    out
}

/// Render the tables in the chosen format, optionally with an evaluated
/// copy at concrete (N, M).
pub fn render_tables(tables: &[Table], format: TableFormat, eval: Option<(i64, i64)>) -> String {
    match format {
        TableFormat::Text => render_text(tables, eval),
        TableFormat::Json => render_json(tables, eval),
        TableFormat::Csv => render_csv(tables, eval),
    }
}
