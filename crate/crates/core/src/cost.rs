//! Hardware unit counts implied by a scheme, and comparison against the
//! published unit tables.
//!
//! Counting rules, applied per stage with no cross-stage optimization:
//!
//! * `Linear`: a row with `k` nonzero entries needs `k - 1` two-input
//!   adders (subtraction is an adder). An entry of `±1` is free, `±2^j` is a
//!   shift, anything else is a constant multiplier.
//! * `Unary`: `Square` is a squarer, `Scale(c)` is classified like a matrix
//!   entry, `Copy` is free.
//! * `Binary`: `Mul` is a multiplier, `Div` a divider, `Copy` free.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::library;
use crate::numeric::{ConstClass, Rational};
use crate::scheme::{BinaryOp, Scheme, SchemeError, Stage, UnaryOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitKind {
    Adder,
    Squarer,
    Multiplier,
    Divider,
    Shift,
    ConstMultiplier,
}

impl fmt::Display for UnitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitKind::Adder => "adder",
            UnitKind::Squarer => "squarer",
            UnitKind::Multiplier => "multiplier",
            UnitKind::Divider => "divider",
            UnitKind::Shift => "shift",
            UnitKind::ConstMultiplier => "constant multiplier",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct CostReport {
    pub adders: usize,
    pub squarers: usize,
    pub multipliers: usize,
    pub dividers: usize,
    pub shifts: usize,
    pub const_multipliers: usize,
}

impl CostReport {
    pub const fn table(
        adders: usize,
        squarers: usize,
        multipliers: usize,
        dividers: usize,
    ) -> Self {
        CostReport {
            adders,
            squarers,
            multipliers,
            dividers,
            shifts: 0,
            const_multipliers: 0,
        }
    }

    pub fn get(&self, unit: UnitKind) -> usize {
        match unit {
            UnitKind::Adder => self.adders,
            UnitKind::Squarer => self.squarers,
            UnitKind::Multiplier => self.multipliers,
            UnitKind::Divider => self.dividers,
            UnitKind::Shift => self.shifts,
            UnitKind::ConstMultiplier => self.const_multipliers,
        }
    }

    fn bump(&mut self, unit: UnitKind) {
        match unit {
            UnitKind::Adder => self.adders += 1,
            UnitKind::Squarer => self.squarers += 1,
            UnitKind::Multiplier => self.multipliers += 1,
            UnitKind::Divider => self.dividers += 1,
            UnitKind::Shift => self.shifts += 1,
            UnitKind::ConstMultiplier => self.const_multipliers += 1,
        }
    }

    fn constant(&mut self, c: &Rational) {
        match c.classify() {
            ConstClass::Zero | ConstClass::PlusMinusOne => {}
            ConstClass::PowerOfTwo(_) => self.bump(UnitKind::Shift),
            ConstClass::General => self.bump(UnitKind::ConstMultiplier),
        }
    }
}

impl Add for CostReport {
    type Output = CostReport;
    fn add(self, o: CostReport) -> CostReport {
        CostReport {
            adders: self.adders + o.adders,
            squarers: self.squarers + o.squarers,
            multipliers: self.multipliers + o.multipliers,
            dividers: self.dividers + o.dividers,
            shifts: self.shifts + o.shifts,
            const_multipliers: self.const_multipliers + o.const_multipliers,
        }
    }
}

impl fmt::Display for CostReport {
    /// Nonzero counted units on one line, e.g. `adders=11 squarers=8 dividers=2`.
    /// Shifts are free and reported separately by callers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = [
            ("adders", self.adders),
            ("squarers", self.squarers),
            ("multipliers", self.multipliers),
            ("dividers", self.dividers),
            ("const_multipliers", self.const_multipliers),
        ]
        .iter()
        .filter(|(_, n)| *n > 0)
        .map(|(k, n)| format!("{k}={n}"))
        .collect();
        if parts.is_empty() {
            write!(f, "adders=0")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

pub fn audit(s: &Scheme) -> Result<CostReport, SchemeError> {
    s.ensure_valid()?;
    let mut r = CostReport::default();
    for stage in &s.stages {
        match stage {
            Stage::Linear(m) => {
                for row in m.row_iter() {
                    let nonzero: Vec<&Rational> = row.iter().filter(|c| !c.is_zero()).collect();
                    r.adders += nonzero.len().saturating_sub(1);
                    for c in nonzero {
                        r.constant(c);
                    }
                }
            }
            Stage::Unary(ops) => {
                for op in ops {
                    match op {
                        UnaryOp::Copy(_) => {}
                        UnaryOp::Square(_) => r.bump(UnitKind::Squarer),
                        UnaryOp::Scale(_, c) => r.constant(c),
                    }
                }
            }
            Stage::Binary(ops) => {
                for op in ops {
                    match op {
                        BinaryOp::Copy(_) => {}
                        BinaryOp::Mul(..) => r.bump(UnitKind::Multiplier),
                        BinaryOp::Div { .. } => r.bump(UnitKind::Divider),
                    }
                }
            }
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostTable {
    /// Direct methods.
    Direct,
    /// Squarer-based schemes.
    Proposed,
}

impl CostTable {
    pub fn number(self) -> u8 {
        match self {
            CostTable::Direct => 1,
            CostTable::Proposed => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    Squaring,
    Multiplication,
    Division,
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operation::Squaring => "squaring",
            Operation::Multiplication => "multiplication",
            Operation::Division => "division",
        })
    }
}

/// One column of a published table: which scheme reproduces it and the
/// printed counts (adders, squarers, multipliers, dividers; a dash is 0).
#[derive(Debug, Clone, Copy)]
pub struct TableColumn {
    pub table: CostTable,
    pub operation: Operation,
    pub scheme: &'static str,
    pub expected: CostReport,
}

pub const PUBLISHED_COSTS: [TableColumn; 6] = [
    TableColumn {
        table: CostTable::Direct,
        operation: Operation::Squaring,
        scheme: "square_direct",
        expected: CostReport::table(1, 2, 1, 0),
    },
    TableColumn {
        table: CostTable::Direct,
        operation: Operation::Multiplication,
        scheme: "mul_direct",
        expected: CostReport::table(2, 0, 4, 0),
    },
    TableColumn {
        table: CostTable::Direct,
        operation: Operation::Division,
        scheme: "div_direct",
        expected: CostReport::table(3, 2, 4, 2),
    },
    TableColumn {
        table: CostTable::Proposed,
        operation: Operation::Squaring,
        scheme: "square_eq6_as_printed",
        expected: CostReport::table(3, 3, 0, 0),
    },
    TableColumn {
        table: CostTable::Proposed,
        operation: Operation::Multiplication,
        scheme: "mul_eq7",
        expected: CostReport::table(14, 6, 0, 0),
    },
    TableColumn {
        table: CostTable::Proposed,
        operation: Operation::Division,
        scheme: "div_eq8_as_printed",
        expected: CostReport::table(11, 8, 0, 2),
    },
];

pub const TABLE_UNITS: [UnitKind; 4] = [
    UnitKind::Adder,
    UnitKind::Squarer,
    UnitKind::Multiplier,
    UnitKind::Divider,
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellComparison {
    pub table: u8,
    pub operation: Operation,
    pub unit: UnitKind,
    pub scheme: String,
    pub expected: usize,
    pub actual: usize,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectedCost {
    pub scheme: String,
    pub cost: CostReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableComparison {
    pub cells: Vec<CellComparison>,
    /// Schemes without a published column, audited for information.
    pub corrected: Vec<CorrectedCost>,
}

impl TableComparison {
    pub fn all_match(&self) -> bool {
        self.cells.iter().all(|c| c.matched)
    }

    pub fn matched_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.matched).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for table in [1u8, 2] {
            let title = if table == 1 {
                "Table 1 (direct methods)"
            } else {
                "Table 2 (squarer-based schemes)"
            };
            out.push_str(title);
            out.push('\n');
            out.push_str(&format!(
                "  {:<16} {:<24} {:<12} {:>8} {:>8}  {}\n",
                "operation", "scheme", "unit", "expected", "actual", "match"
            ));
            for c in self.cells.iter().filter(|c| c.table == table) {
                out.push_str(&format!(
                    "  {:<16} {:<24} {:<12} {:>8} {:>8}  {}\n",
                    c.operation.to_string(),
                    c.scheme,
                    format!("{}s", c.unit),
                    c.expected,
                    c.actual,
                    if c.matched { "yes" } else { "NO" }
                ));
            }
        }
        out.push_str("Schemes without a table column\n");
        for c in &self.corrected {
            out.push_str(&format!(
                "  {:<24} {} shifts={}\n",
                c.scheme, c.cost, c.cost.shifts
            ));
        }
        out.push_str(&format!(
            "{}/{} cells match\n",
            self.matched_cells(),
            self.cells.len()
        ));
        out
    }
}

pub fn compare_tables() -> TableComparison {
    let mut cells = Vec::with_capacity(24);
    for col in &PUBLISHED_COSTS {
        let entry = library::builtin(col.scheme).expect("table schemes are built in");
        let actual = audit(&entry.scheme).expect("built-ins validate");
        for unit in TABLE_UNITS {
            let expected = col.expected.get(unit);
            let got = actual.get(unit);
            cells.push(CellComparison {
                table: col.table.number(),
                operation: col.operation,
                unit,
                scheme: col.scheme.to_string(),
                expected,
                actual: got,
                matched: expected == got,
            });
        }
    }
    let corrected = library::list_builtins()
        .into_iter()
        .filter(|name| PUBLISHED_COSTS.iter().all(|c| c.scheme != *name))
        .map(|name| {
            let entry = library::builtin(name).expect("listed");
            CorrectedCost {
                scheme: name.to_string(),
                cost: audit(&entry.scheme).expect("built-ins validate"),
            }
        })
        .collect();
    TableComparison { cells, corrected }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::RMatrix;

    #[test]
    fn linear_rows_cost_k_minus_one_adders() {
        let s = Scheme::new(
            "l",
            &["x", "y", "z"],
            &["p", "q", "r"],
            vec![Stage::Linear(
                RMatrix::from_rows(vec![
                    vec![1.into(), (-1).into(), 2.into()],
                    vec![0.into(), Rational::new(3, 5).unwrap(), 0.into()],
                    vec![0.into(), 0.into(), 0.into()],
                ])
                .unwrap(),
            )],
        );
        let r = audit(&s).unwrap();
        assert_eq!(r.adders, 2);
        assert_eq!(r.shifts, 1);
        assert_eq!(r.const_multipliers, 1);
    }

    #[test]
    fn quarter_scale_is_a_shift() {
        let s = Scheme::new(
            "s",
            &["x"],
            &["y"],
            vec![Stage::Unary(vec![UnaryOp::Scale(
                0,
                Rational::new(1, 4).unwrap(),
            )])],
        );
        assert_eq!(
            audit(&s).unwrap(),
            CostReport {
                shifts: 1,
                ..Default::default()
            }
        );
    }

    #[test]
    fn invalid_scheme_not_audited() {
        let s = Scheme::new("bad", &["x"], &["y"], vec![Stage::linear_ints(&[[1, 1]])]);
        assert!(audit(&s).is_err());
    }

    #[test]
    fn display_omits_zero_units() {
        assert_eq!(
            CostReport::table(11, 8, 0, 2).to_string(),
            "adders=11 squarers=8 dividers=2"
        );
        assert_eq!(CostReport::default().to_string(), "adders=0");
    }
}
