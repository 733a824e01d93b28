//! Pell-graph structure: the canonical decomposition `A | B10 B11 B122 | C`,
//! per-edge classification with the predicted imbalance, and exact
//! evaluators for the imbalance counts `e_n^i`, `irr(Π_n)` and `σ(Π_n)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expansion::{
    expand, is_isomorphism, Expansion, ExpansionError, ExpansionSpec, Side, SpecViolation,
};
use crate::graphs::{build_pell_graph, BuildLimits, Graph, GraphError, VertexSubset};
use crate::seq::{pell, Exact, FormulaError, PellTable, SeqValue};
use crate::words::PellString;

/// Largest imbalance an edge of a Pell graph can have.
pub const MAX_PELL_IMBALANCE: usize = 4;

/// Block of the canonical decomposition a vertex belongs to, read from its
/// leading symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Part {
    /// `0…`
    A,
    /// `10…`
    B10,
    /// `11…`
    B11,
    /// `122…`
    B122,
    /// `22…`
    C,
}

impl Part {
    pub fn of(symbols: &[u8]) -> Option<Part> {
        match symbols {
            [0, ..] => Some(Part::A),
            [1, 0, ..] => Some(Part::B10),
            [1, 1, ..] => Some(Part::B11),
            [1, 2, ..] => Some(Part::B122),
            [2, ..] => Some(Part::C),
            _ => None,
        }
    }

    pub fn in_b(self) -> bool {
        matches!(self, Part::B10 | Part::B11 | Part::B122)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub n: usize,
    part_of: Vec<Part>,
}

impl Decomposition {
    pub fn part(&self, v: usize) -> Part {
        self.part_of[v]
    }

    pub fn parts(&self) -> &[Part] {
        &self.part_of
    }

    pub fn members(&self, part: Part) -> VertexSubset {
        VertexSubset::new(
            self.part_of
                .iter()
                .enumerate()
                .filter_map(|(v, &p)| (p == part).then_some(v))
                .collect(),
        )
    }

    /// All of `B = B10 ∪ B11 ∪ B122`.
    pub fn b_members(&self) -> VertexSubset {
        VertexSubset::new(
            self.part_of
                .iter()
                .enumerate()
                .filter_map(|(v, p)| p.in_b().then_some(v))
                .collect(),
        )
    }

    pub fn size(&self, part: Part) -> usize {
        self.part_of.iter().filter(|&&p| p == part).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructError {
    #[error("decomposition needs n >= 2, got {0}")]
    TooShort(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{0} and {1} are not adjacent Pell strings")]
    NotAdjacent(String, String),
}

/// Tags every vertex of the Pell graph of dimension `n` (canonical order).
pub fn decompose(n: usize, limits: &BuildLimits) -> Result<Decomposition, StructError> {
    if n < 2 {
        return Err(StructError::TooShort(n));
    }
    if n > limits.pell {
        return Err(GraphError::OverBuildLimit {
            family: "pell",
            n,
            limit: limits.pell,
        }
        .into());
    }
    let part_of = crate::words::generate_pell(n)
        .iter()
        .map(|w| Part::of(w.symbols()).expect("n >= 2 words have a block"))
        .collect();
    Ok(Decomposition { n, part_of })
}

/// Decomposition of an already built Pell graph, read from its labels.
pub fn decompose_labeled(g: &Graph) -> Option<Decomposition> {
    let labels = g.labels()?;
    let n = labels.first()?.len();
    let part_of = labels
        .iter()
        .map(|l| {
            l.parse::<PellString>()
                .ok()
                .and_then(|w| Part::of(w.symbols()))
        })
        .collect::<Option<Vec<_>>>()?;
    Some(Decomposition { n, part_of })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    /// `0 <-> 1` at one coordinate.
    Flip,
    /// `11 <-> 22` on two consecutive coordinates.
    Swap,
}

/// Where an edge rewrites its endpoints and the imbalance that the rewrite
/// context forces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeClass {
    pub kind: EdgeKind,
    /// First rewritten coordinate, 0-based.
    pub site: usize,
    /// Coordinate just before the site is `1` on the all-ones endpoint.
    pub left_is_one: bool,
    /// Coordinate just after the site (or after the pair) is `1`.
    pub right_is_one: bool,
    pub predicted: u8,
}

/// Classifies the edge `uv` of a Pell graph. Missing boundary coordinates
/// count as "not 1".
pub fn classify_edge(u: &PellString, v: &PellString) -> Result<EdgeClass, StructError> {
    let not_adjacent = || StructError::NotAdjacent(u.to_string(), v.to_string());
    if u.len() != v.len() {
        return Err(not_adjacent());
    }
    let (a, b) = (u.symbols(), v.symbols());
    let diff: Vec<usize> = (0..a.len()).filter(|&i| a[i] != b[i]).collect();
    let (kind, site, width, ones) = match *diff.as_slice() {
        [i] if a[i] + b[i] == 1 => (EdgeKind::Flip, i, 1, if a[i] == 1 { a } else { b }),
        [i, j] if j == i + 1 && a[i] == a[j] && b[i] == b[j] && a[i] + b[i] == 3 => {
            (EdgeKind::Swap, i, 2, if a[i] == 1 { a } else { b })
        }
        _ => return Err(not_adjacent()),
    };
    let left_is_one = site > 0 && ones[site - 1] == 1;
    let right_is_one = ones.get(site + width) == Some(&1);
    let base = match kind {
        EdgeKind::Flip => 0,
        EdgeKind::Swap => 2,
    };
    Ok(EdgeClass {
        kind,
        site,
        left_is_one,
        right_is_one,
        predicted: base + u8::from(left_is_one) + u8::from(right_is_one),
    })
}

/// `e_n^i` for `n ∈ {1, 2, 3}` as stated with the recurrence.
const INITIAL_COUNTS: [[u64; 5]; 3] = [[1, 0, 0, 0, 0], [2, 2, 1, 0, 0], [7, 6, 3, 2, 0]];

pub fn e_initial(n: usize, i: usize) -> Option<SeqValue> {
    if !(1..=3).contains(&n) || i > MAX_PELL_IMBALANCE {
        return None;
    }
    Some(SeqValue::from(INITIAL_COUNTS[n - 1][i]))
}

fn check_imbalance(formula: &'static str, i: usize) -> Result<(), FormulaError> {
    if i > MAX_PELL_IMBALANCE {
        return Err(FormulaError::OutOfDomain {
            formula,
            detail: format!("imbalance {i} > {MAX_PELL_IMBALANCE}"),
        });
    }
    Ok(())
}

/// Closed form of `e_n^i`, defined for `n >= 4`.
pub fn e_closed(n: usize, i: usize) -> Result<SeqValue, FormulaError> {
    if n < 4 {
        return Err(FormulaError::OutOfDomain {
            formula: "e_closed",
            detail: format!("n = {n} < 4"),
        });
    }
    e_closed_unrestricted(n as i64, i)
}

/// Evaluates the closed form of `e_n^i` at any `n` where every Pell index is
/// at least -1. Used to probe the formula below its stated range.
pub fn e_closed_unrestricted(n: i64, i: usize) -> Result<SeqValue, FormulaError> {
    check_imbalance("e_closed", i)?;
    let ex = Exact {
        formula: "e_closed",
    };
    let table = PellTable::new((n - 2).max(-1))?;
    let p = |k: i64| table.signed(k);
    let m = i128::from(n);
    let value = match i {
        0 => {
            let num = ex.add(ex.mul(m + 2, p(n - 2)?)?, ex.mul(m + 1, p(n - 3)?)?)?;
            ex.div_exact(num, 2)?
        }
        1 => ex.mul(m, p(n - 2)?)?,
        2 => {
            let num = ex.add(ex.mul(5 * m - 3, p(n - 3)?)?, ex.mul(3 * m - 2, p(n - 4)?)?)?;
            ex.div_exact(num, 4)?
        }
        3 => ex.mul(m - 1, p(n - 3)?)?,
        _ => {
            let num = ex.add(ex.mul(m - 3, p(n - 3)?)?, ex.mul(m - 2, p(n - 4)?)?)?;
            ex.div_exact(num, 4)?
        }
    };
    ex.nonnegative(value)
}

/// One step of the imbalance-count recurrence. `lookup(m, i)` supplies
/// `e_m^i` for `m < n`.
pub fn e_recurrence<F>(n: usize, i: usize, lookup: F) -> Result<SeqValue, FormulaError>
where
    F: Fn(usize, usize) -> Option<SeqValue>,
{
    const NAME: &str = "e_recurrence";
    check_imbalance(NAME, i)?;
    if n < 4 {
        return Err(FormulaError::OutOfDomain {
            formula: NAME,
            detail: format!("n = {n} < 4"),
        });
    }
    let missing = |m: usize| FormulaError::OutOfDomain {
        formula: NAME,
        detail: format!("missing e_{m}^{i}"),
    };
    let prev = lookup(n - 1, i).ok_or_else(|| missing(n - 1))?;
    let prev2 = lookup(n - 2, i).ok_or_else(|| missing(n - 2))?;
    let n = n as i64;
    let p = |k: i64| pell(k);
    let extra = match i {
        0 => SeqValue(2) * p(n - 3)?,
        1 => p(n - 2)? + p(n - 4)?,
        2 => p(n - 3)? + SeqValue(2) * p(n - 4)?,
        3 => p(n - 3)? + p(n - 5)?,
        _ => p(n - 4)?,
    };
    SeqValue(2)
        .checked_mul(prev)
        .and_then(|x| x.checked_add(prev2))
        .and_then(|x| x.checked_add(extra))
        .ok_or(FormulaError::Overflow { formula: NAME })
}

/// `e_n^i` for `0 <= n <= max_n` from the initial values and the
/// recurrence; row `n` holds `[e_n^0, …, e_n^4]` (row 0 is all zero).
pub fn e_by_recurrence(max_n: usize) -> Result<Vec<[SeqValue; 5]>, FormulaError> {
    let mut rows = vec![[SeqValue::ZERO; 5]];
    for n in 1..=max_n {
        let mut row = [SeqValue::ZERO; 5];
        for (i, slot) in row.iter_mut().enumerate() {
            *slot = match e_initial(n, i) {
                Some(v) => v,
                None => e_recurrence(n, i, |m, k| rows.get(m).map(|r: &[SeqValue; 5]| r[k]))?,
            };
        }
        rows.push(row);
    }
    Ok(rows)
}

/// `|E(Π_n)| = (n/2) p_n`.
pub fn edge_count_closed(n: usize) -> Result<SeqValue, FormulaError> {
    let ex = Exact {
        formula: "edge_count",
    };
    let p = pell(n as i64)?.signed().ok_or(FormulaError::Overflow {
        formula: "edge_count",
    })?;
    ex.nonnegative(ex.div_exact(ex.mul(n as i128, p)?, 2)?)
}

/// Both readings of the self-convolution for `e_n^4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convolution {
    pub n: usize,
    /// `Σ_{k=0}^{n-4} p_k p_{n-4-k}`: strings `x 1221 y` with Pell `x`, `y`.
    pub proof_form: SeqValue,
    /// `Σ_{k=0}^{n-4} p_k p_{n-k}`, the same sum with the shift dropped.
    pub displayed_form: SeqValue,
}

fn convolution(n: usize, shift: i64) -> Result<SeqValue, FormulaError> {
    const NAME: &str = "e4_convolution";
    if n < 4 {
        return Err(FormulaError::OutOfDomain {
            formula: NAME,
            detail: format!("n = {n} < 4"),
        });
    }
    let table = PellTable::new(n as i64)?;
    let mut acc = SeqValue::ZERO;
    for k in 0..=(n as i64 - 4) {
        let term = table.get(k)?.checked_mul(table.get(n as i64 - k - shift)?);
        acc = term
            .and_then(|t| acc.checked_add(t))
            .ok_or(FormulaError::Overflow { formula: NAME })?;
    }
    Ok(acc)
}

/// Proof-form convolution `Σ p_k p_{n-4-k}`; equals `e_n^4`.
pub fn e4_convolution(n: usize) -> Result<SeqValue, FormulaError> {
    convolution(n, 4)
}

/// Unshifted convolution `Σ p_k p_{n-k}`.
pub fn e4_convolution_displayed(n: usize) -> Result<SeqValue, FormulaError> {
    convolution(n, 0)
}

pub fn e4_convolution_both(n: usize) -> Result<Convolution, FormulaError> {
    Ok(Convolution {
        n,
        proof_form: e4_convolution(n)?,
        displayed_form: e4_convolution_displayed(n)?,
    })
}

/// `irr(Π_n) = ½(n p_n + (n-3) p_{n-1})`, `n >= 1`.
pub fn irr_closed(n: usize) -> Result<SeqValue, FormulaError> {
    const NAME: &str = "irr_closed";
    if n < 1 {
        return Err(FormulaError::OutOfDomain {
            formula: NAME,
            detail: "n = 0".into(),
        });
    }
    let ex = Exact { formula: NAME };
    let table = PellTable::new(n as i64)?;
    let m = n as i128;
    let num = ex.add(
        ex.mul(m, table.signed(n as i64)?)?,
        ex.mul(m - 3, table.signed(n as i64 - 1)?)?,
    )?;
    ex.nonnegative(ex.div_exact(num, 2)?)
}

/// `irr(Π_n) = 2 irr(Π_{n-1}) + irr(Π_{n-2}) + 2 p_{n-1}` for `n >= 3`.
pub fn irr_recurrence(n: usize, prev: SeqValue, prev2: SeqValue) -> Result<SeqValue, FormulaError> {
    const NAME: &str = "irr_recurrence";
    if n < 3 {
        return Err(FormulaError::OutOfDomain {
            formula: NAME,
            detail: format!("n = {n} < 3"),
        });
    }
    let extra = pell(n as i64 - 1)?;
    SeqValue(2)
        .checked_mul(prev)
        .and_then(|x| x.checked_add(prev2))
        .and_then(|x| x.checked_add(SeqValue(2).checked_mul(extra)?))
        .ok_or(FormulaError::Overflow { formula: NAME })
}

/// `irr(Π_n)` for `1 <= n <= max_n` (index `n - 1`) from `irr(Π_1) = 0`,
/// `irr(Π_2) = 4`.
pub fn irr_by_recurrence(max_n: usize) -> Result<Vec<SeqValue>, FormulaError> {
    let mut out = vec![SeqValue(0), SeqValue(4)];
    for n in 3..=max_n {
        let next = irr_recurrence(n, out[n - 2], out[n - 3])?;
        out.push(next);
    }
    out.truncate(max_n);
    Ok(out)
}

/// `σ(Π_n) = (4n-4) p_{n-1} - 2 p_{n-2}`, `n > 1`.
pub fn sigma_closed(n: usize) -> Result<SeqValue, FormulaError> {
    const NAME: &str = "sigma_closed";
    if n <= 1 {
        return Err(FormulaError::OutOfDomain {
            formula: NAME,
            detail: format!("n = {n} <= 1"),
        });
    }
    let ex = Exact { formula: NAME };
    let table = PellTable::new(n as i64)?;
    let m = n as i128;
    let value = ex.add(
        ex.mul(4 * m - 4, table.signed(n as i64 - 1)?)?,
        ex.mul(-2, table.signed(n as i64 - 2)?)?,
    )?;
    ex.nonnegative(value)
}

/// Which block pair an edge of `Π_n` joins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeCategory {
    InsideA,
    InsideC,
    /// Inside `B`, both ends in `B11` or both outside it.
    InsideB,
    /// Inside `B`, between `B11` and `B10 ∪ B122`.
    InsideBShifted,
    /// `A`–`B`, of the `01…`/`11…` form.
    AbOne,
    AbOther,
    /// `B`–`C`, of the `111…`/`221…` form.
    BcOne,
    BcOther,
    /// `A`–`C` (never present in a Pell graph).
    AcStray,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralViolation {
    pub u: String,
    pub v: String,
    pub category: EdgeCategory,
    pub detail: String,
}

/// A count of edges in one category against the value implied by the
/// block structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCount {
    pub category: EdgeCategory,
    pub actual: u64,
    /// `None` where the block structure gives no closed count.
    pub expected: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralReport {
    pub n: usize,
    pub counts: Vec<CategoryCount>,
    pub violations: Vec<StructuralViolation>,
}

impl StructuralReport {
    pub fn count(&self, category: EdgeCategory) -> u64 {
        self.counts
            .iter()
            .find(|c| c.category == category)
            .map_or(0, |c| c.actual)
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
            && self
                .counts
                .iter()
                .all(|c| c.expected.is_none_or(|e| e == c.actual))
    }
}

/// Checks edge by edge how imbalances in `Π_n` relate to those inside the
/// decomposition blocks, for `n >= 3`.
pub fn structural_imbalance_deltas(
    n: usize,
    limits: &BuildLimits,
) -> Result<StructuralReport, StructError> {
    if n < 3 {
        return Err(StructError::TooShort(n));
    }
    let g = build_pell_graph(n, limits)?;
    let dec = decompose(n, limits)?;
    Ok(structural_report(&g, &dec))
}

pub(crate) fn structural_report(g: &Graph, dec: &Decomposition) -> StructuralReport {
    use EdgeCategory::*;
    let labels = g.labels().expect("pell graphs are labeled");
    let block = |p: Part| match p {
        Part::A => 0u8,
        Part::C => 2,
        _ => 1,
    };
    // degree inside the vertex's own A/B/C block
    let inner_degree = |v: usize| {
        let b = block(dec.part(v));
        g.neighbors(v)
            .iter()
            .filter(|&&w| block(dec.part(w)) == b)
            .count()
    };
    let mut tallies = std::collections::BTreeMap::<EdgeCategory, u64>::new();
    let mut violations = Vec::new();
    for (x, y) in g.edges() {
        let (px, py) = (dec.part(x), dec.part(y));
        let imb = g.neighbors(x).len().abs_diff(g.neighbors(y).len());
        let inner = inner_degree(x).abs_diff(inner_degree(y));
        let (category, ok, detail) = match (block(px), block(py)) {
            (0, 0) => (
                InsideA,
                imb == inner,
                format!("imbalance {imb}, inside A {inner}"),
            ),
            (2, 2) => (
                InsideC,
                imb == inner,
                format!("imbalance {imb}, inside C {inner}"),
            ),
            (1, 1) => {
                let shifted = (px == Part::B11) != (py == Part::B11);
                if shifted {
                    (
                        InsideBShifted,
                        imb == inner + 1,
                        format!("imbalance {imb}, inside B {inner}, expected +1"),
                    )
                } else {
                    (
                        InsideB,
                        imb == inner,
                        format!("imbalance {imb}, inside B {inner}"),
                    )
                }
            }
            (0, 1) | (1, 0) => {
                let (a, b) = if block(px) == 0 { (x, y) } else { (y, x) };
                let one = labels[a].starts_with("01") && labels[b].starts_with("11");
                let want = usize::from(one);
                (
                    if one { AbOne } else { AbOther },
                    imb == want,
                    format!("imbalance {imb}, expected {want}"),
                )
            }
            (1, 2) | (2, 1) => {
                let (b, c) = if block(px) == 1 { (x, y) } else { (y, x) };
                let one = labels[b].starts_with("111") && labels[c].starts_with("221");
                let want = if one { 3 } else { 2 };
                (
                    if one { BcOne } else { BcOther },
                    imb == want,
                    format!("imbalance {imb}, expected {want}"),
                )
            }
            _ => (AcStray, false, "edge between A and C".to_string()),
        };
        *tallies.entry(category).or_default() += 1;
        if !ok {
            violations.push(StructuralViolation {
                u: labels[x].clone(),
                v: labels[y].clone(),
                category,
                detail,
            });
        }
    }
    let n = dec.n as i64;
    let p = |k: i64| pell(k).map(|v| v.get() as u64).ok();
    let expected = |c: EdgeCategory| -> Option<u64> {
        match c {
            // B10–B11 edges plus B122–B11 edges
            InsideBShifted => Some(p(n - 2)? + p(n - 3)?),
            AbOne => Some(p(n - 2)?),
            AbOther => Some(p(n - 1)? - p(n - 2)?),
            BcOne => Some(p(n - 3)?),
            BcOther => Some(p(n - 3)? + p(n - 4)?),
            AcStray => Some(0),
            _ => None,
        }
    };
    let counts = [
        InsideA,
        InsideB,
        InsideBShifted,
        InsideC,
        AbOne,
        AbOther,
        BcOne,
        BcOther,
        AcStray,
    ]
    .into_iter()
    .map(|c| CategoryCount {
        category: c,
        actual: tallies.get(&c).copied().unwrap_or(0),
        expected: expected(c),
    })
    .collect();
    StructuralReport {
        n: dec.n,
        counts,
        violations,
    }
}

/// `Π_n` built as a peripheral expansion of the doubled `Π_{n-1}`.
///
/// The host is `Π_{n-1}` doubled (first copy read as prefix `0`, second as
/// prefix `1`); `V1` is the whole host and `V2` the second-copy vertices
/// whose word starts with `1`, i.e. the `11…` block.
#[derive(Debug, Clone)]
pub struct PellExpansion {
    pub n: usize,
    pub host: Graph,
    pub spec: ExpansionSpec,
    pub expanded: Expansion,
    /// Pell word of every expanded vertex, via provenance.
    pub words: Vec<PellString>,
}

pub fn pell_as_expansion(n: usize, limits: &BuildLimits) -> Result<PellExpansion, ExpansionError> {
    if n < 2 {
        return Err(ExpansionError::InvalidSpec(vec![
            SpecViolation::EmptyIntersection,
        ]));
    }
    let base = build_pell_graph(n - 1, limits)?;
    let base_words = crate::words::generate_pell(n - 1);
    let doubled = expand(&base, &ExpansionSpec::doubling(base.n_vertices()))?;
    let v2: Vec<usize> = base_words
        .iter()
        .enumerate()
        .filter(|(_, w)| w.starts_with(&[1]))
        .filter_map(|(i, _)| doubled.index_of(i, Side::Second))
        .collect();
    let host = doubled.graph.clone();
    let spec = ExpansionSpec::new(VertexSubset::all(host.n_vertices()), v2);
    let expanded = expand(&host, &spec)?;
    let words = expanded
        .origin
        .iter()
        .map(|&(h, outer)| {
            let (b, inner) = doubled.origin[h];
            let w = base_words[b].symbols();
            let symbols = match (outer, inner) {
                (Side::First, Side::First) => [&[0u8][..], w].concat(),
                (Side::First, Side::Second) => [&[1u8][..], w].concat(),
                // new copy of 1x becomes 22x
                (Side::Second, _) => [&[2u8, 2][..], &w[1..]].concat(),
            };
            PellString::new(symbols).expect("prefixing keeps Pell words valid")
        })
        .collect();
    Ok(PellExpansion {
        n,
        host,
        spec,
        expanded,
        words,
    })
}

impl PellExpansion {
    /// Whether the provenance words identify the expansion with `Π_n`
    /// edge for edge.
    pub fn matches_pell_graph(&self, pell_graph: &Graph) -> bool {
        let map: Result<Vec<usize>, _> = self
            .words
            .iter()
            .map(|w| crate::words::rank(w).map(|r| r as usize))
            .collect();
        map.is_ok_and(|m| is_isomorphism(&self.expanded.graph, pell_graph, &m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::irregularity;

    fn w(s: &str) -> PellString {
        s.parse().unwrap()
    }

    fn limits() -> BuildLimits {
        BuildLimits::default()
    }

    #[test]
    fn pell_graph_is_an_expansion_of_its_doubled_predecessor() {
        for n in 2..=9 {
            let pe = pell_as_expansion(n, &limits()).unwrap();
            let g = build_pell_graph(n, &limits()).unwrap();
            assert!(pe.spec.is_peripheral(pe.host.n_vertices()));
            assert!(pe.matches_pell_graph(&g), "n = {n}");
            assert_eq!(
                irregularity::irr(&pe.expanded.graph),
                irr_closed(n).unwrap().get()
            );
            // no inverted boundary edges, so the peripheral form is exact here
            assert!(crate::expansion::boundary_inversions(&pe.host, &pe.spec)
                .unwrap()
                .is_empty());
            let rhs = crate::expansion::irr_peripheral_rhs(&pe.host, &pe.spec).unwrap();
            assert_eq!(rhs, irr_closed(n).unwrap().get());
        }
        assert!(pell_as_expansion(1, &limits()).is_err());
    }

    #[test]
    fn decomposition_of_pi2() {
        let d = decompose(2, &limits()).unwrap();
        // 00, 01, 10, 11, 22
        assert_eq!(d.parts(), [Part::A, Part::A, Part::B10, Part::B11, Part::C]);
        assert_eq!(d.size(Part::B122), 0);
        assert_eq!(decompose(3, &limits()).unwrap().size(Part::B122), 1);
        assert_eq!(decompose(4, &limits()).unwrap().size(Part::A), 12);
        assert!(matches!(
            decompose(1, &limits()),
            Err(StructError::TooShort(1))
        ));
    }

    #[test]
    fn decomposition_block_sizes() {
        for n in 3..=12usize {
            let d = decompose(n, &limits()).unwrap();
            let p = |k: usize| pell(k as i64).unwrap().get() as usize;
            assert_eq!(d.size(Part::A), p(n - 1));
            assert_eq!(d.b_members().len(), p(n - 1));
            assert_eq!(d.size(Part::C), p(n - 2));
            assert_eq!(d.size(Part::B10), p(n - 2));
            assert_eq!(d.size(Part::B11), p(n - 2));
            assert_eq!(d.size(Part::B122), p(n - 3));
            // canonical order makes the blocks contiguous: A, then B, then C
            let parts = d.parts();
            assert!(parts
                .windows(2)
                .all(|x| x[0] <= x[1] || (x[0].in_b() && x[1].in_b())));
        }
    }

    #[test]
    fn classify_examples() {
        let c = classify_edge(&w("00"), &w("01")).unwrap();
        assert_eq!((c.kind, c.predicted), (EdgeKind::Flip, 0));
        let c = classify_edge(&w("11"), &w("22")).unwrap();
        assert_eq!((c.kind, c.site, c.predicted), (EdgeKind::Swap, 0, 2));
        let c = classify_edge(&w("1111"), &w("1221")).unwrap();
        assert_eq!(c.kind, EdgeKind::Swap);
        assert_eq!(c.site, 1);
        assert!(c.left_is_one && c.right_is_one);
        assert_eq!(c.predicted, 4);
        // orientation does not matter
        assert_eq!(classify_edge(&w("1221"), &w("1111")).unwrap(), c);
        assert!(classify_edge(&w("00"), &w("11")).is_err());
        assert!(classify_edge(&w("00"), &w("000")).is_err());
        assert!(classify_edge(&w("2200"), &w("1111")).is_err());
    }

    #[test]
    fn classification_predicts_measured_imbalance() {
        for n in 1..=10 {
            let g = build_pell_graph(n, &limits()).unwrap();
            let words = crate::words::generate_pell(n);
            for (x, y) in g.edges() {
                let c = classify_edge(&words[x], &words[y]).unwrap();
                let measured = irregularity::imbalance(&g, x, y).unwrap();
                assert_eq!(
                    u64::from(c.predicted),
                    measured,
                    "{} {}",
                    words[x],
                    words[y]
                );
                match c.kind {
                    EdgeKind::Flip => assert!(c.predicted <= 2),
                    EdgeKind::Swap => assert!((2..=4).contains(&c.predicted)),
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(e_closed(4, 4).unwrap(), SeqValue(1));
        assert_eq!(e_closed(4, 0).unwrap(), SeqValue(20));
        assert_eq!(e_closed(4, 2).unwrap(), SeqValue(11));
        let total: SeqValue = (0..=4).map(|i| e_closed(4, i).unwrap()).sum();
        assert_eq!(total, SeqValue(58));
        assert!(e_closed(3, 0).is_err());
        assert!(e_closed(5, 5).is_err());
        // below the stated range, only where every index is defined
        assert_eq!(e_closed_unrestricted(3, 0).unwrap(), SeqValue(7));
        assert!(e_closed_unrestricted(2, 2).is_err());
    }

    #[test]
    fn closed_forms_sum_to_edge_count() {
        for n in 4..=30 {
            let total: SeqValue = (0..=4).map(|i| e_closed(n, i).unwrap()).sum();
            assert_eq!(total, edge_count_closed(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn recurrence_examples() {
        let rows = e_by_recurrence(4).unwrap();
        assert_eq!(rows[4][0], SeqValue(20));
        assert_eq!(rows[4][3], SeqValue(6));
        assert_eq!(e_initial(2, 1), Some(SeqValue(2)));
        assert_eq!(e_initial(4, 1), None);
        assert!(e_recurrence(4, 0, |_, _| None).is_err());
        let v = e_recurrence(4, 0, e_initial).unwrap();
        assert_eq!(v, SeqValue(20));
    }

    #[test]
    fn recurrence_and_closed_form_agree() {
        let rows = e_by_recurrence(40).unwrap();
        for (n, row) in rows.iter().enumerate().skip(4) {
            for (i, &v) in row.iter().enumerate() {
                assert_eq!(v, e_closed(n, i).unwrap(), "n = {n}, i = {i}");
            }
        }
    }

    #[test]
    fn convolution_forms() {
        assert_eq!(e4_convolution(4).unwrap(), SeqValue(1));
        assert_eq!(e4_convolution(5).unwrap(), SeqValue(4));
        assert_eq!(e4_convolution_displayed(4).unwrap(), SeqValue(29));
        assert!(e4_convolution(3).is_err());
        for n in 4..=14 {
            assert_eq!(e4_convolution(n).unwrap(), e_closed(n, 4).unwrap());
        }
    }

    #[test]
    fn irr_examples() {
        assert_eq!(irr_closed(1).unwrap(), SeqValue(0));
        assert_eq!(irr_closed(2).unwrap(), SeqValue(4));
        assert_eq!(irr_closed(3).unwrap(), SeqValue(18));
        assert_eq!(irr_closed(4).unwrap(), SeqValue(64));
        assert_eq!(
            irr_recurrence(4, SeqValue(18), SeqValue(4)).unwrap(),
            SeqValue(64)
        );
        assert!(irr_recurrence(2, SeqValue(0), SeqValue(0)).is_err());
        let rec = irr_by_recurrence(40).unwrap();
        assert_eq!(rec.len(), 40);
        for (k, v) in rec.iter().enumerate() {
            assert_eq!(*v, irr_closed(k + 1).unwrap());
        }
        assert_eq!(irr_by_recurrence(1).unwrap(), vec![SeqValue(0)]);
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_closed(2).unwrap(), SeqValue(6));
        assert_eq!(sigma_closed(3).unwrap(), SeqValue(36));
        assert!(sigma_closed(1).is_err());
        for n in 4..=20 {
            let moment: SeqValue = (0..=4)
                .map(|i| SeqValue((i * i) as u128) * e_closed(n, i).unwrap())
                .sum();
            assert_eq!(sigma_closed(n).unwrap(), moment, "n = {n}");
        }
    }

    #[test]
    fn structural_small_case() {
        let r = structural_imbalance_deltas(3, &limits()).unwrap();
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert_eq!(r.count(EdgeCategory::AbOne), 2);
        assert_eq!(r.count(EdgeCategory::BcOther), 1);
        assert_eq!(r.count(EdgeCategory::BcOne), 1);
        assert!(r.passed());
        assert!(structural_imbalance_deltas(2, &limits()).is_err());
    }

    #[test]
    fn structural_deltas_hold() {
        for n in 3..=12 {
            let r = structural_imbalance_deltas(n, &limits()).unwrap();
            assert!(r.passed(), "n = {n}: {:?}", r);
        }
    }
}
