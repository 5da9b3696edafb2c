//! Orbit designs of `AGL(1, F_q)` and the constant-weight codes formed by
//! the rows of their incidence matrices.
//!
//! For `B ⊆ F_q` with `2 <= |B| < q`, the distinct images `σ(B)` form a
//! 2-design because the group is 2-transitive. The rows of its incidence
//! matrix meet the restricted Johnson bound with equality.

use std::fmt::Write as _;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::agl::{AffineMap, SubgroupDesc};
use crate::counting::{prime_power, SubgroupClass};
use crate::error::{Error, Result};
use crate::ffield::Field;
use crate::oracle::{stabilizer, OracleConfig, SubsetBitmask};

/// `(v, b, r, k, λ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DesignParams {
    pub v: u64,
    pub b: u64,
    pub r: u64,
    pub k: u64,
    pub lambda: u64,
}

impl DesignParams {
    /// Checks `bk = vr`, `r(k-1) = λ(v-1)` and `2 <= k <= v`.
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 || self.k > self.v {
            return Err(Error::DesignCheck(format!("k = {} outside 2..={}", self.k, self.v)));
        }
        if self.b * self.k != self.v * self.r {
            return Err(Error::DesignCheck(format!("bk = {} != vr = {}", self.b * self.k, self.v * self.r)));
        }
        if self.r * (self.k - 1) != self.lambda * (self.v - 1) {
            return Err(Error::DesignCheck(format!(
                "r(k-1) = {} != lambda(v-1) = {}",
                self.r * (self.k - 1),
                self.lambda * (self.v - 1)
            )));
        }
        Ok(())
    }
}

/// `v × b` 0/1 matrix; entry `(x, j)` is set when point `x` lies in block `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix {
    v: usize,
    b: usize,
    rows: Vec<Vec<bool>>,
}

impl IncidenceMatrix {
    pub fn from_rows(rows: Vec<Vec<bool>>) -> Result<Self> {
        let b = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != b) {
            return Err(Error::InvalidArgument("ragged incidence matrix".into()));
        }
        Ok(IncidenceMatrix { v: rows.len(), b, rows })
    }

    /// Rows are points `0..v`, columns are `blocks` in the given order.
    pub fn from_blocks(v: u32, blocks: &[SubsetBitmask]) -> Self {
        let rows = (0..v)
            .map(|x| {
                blocks
                    .iter()
                    .map(|blk| blk.contains(crate::ffield::FieldElement(x)))
                    .collect()
            })
            .collect();
        IncidenceMatrix {
            v: v as usize,
            b: blocks.len(),
            rows,
        }
    }

    pub fn v(&self) -> usize {
        self.v
    }
    pub fn b(&self) -> usize {
        self.b
    }
    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    /// Row sums `r`, column sums `k`, pairwise row overlaps `λ`.
    pub fn check(&self, params: &DesignParams) -> Result<()> {
        if self.v as u64 != params.v || self.b as u64 != params.b {
            return Err(Error::DesignCheck(format!(
                "matrix is {}x{}, expected {}x{}",
                self.v, self.b, params.v, params.b
            )));
        }
        for (x, row) in self.rows.iter().enumerate() {
            let r = row.iter().filter(|&&e| e).count() as u64;
            if r != params.r {
                return Err(Error::DesignCheck(format!("point {x} lies in {r} blocks, expected {}", params.r)));
            }
        }
        for col in 0..self.b {
            let k = self.rows.iter().filter(|row| row[col]).count() as u64;
            if k != params.k {
                return Err(Error::DesignCheck(format!("block {col} has {k} points, expected {}", params.k)));
            }
        }
        let bad = (0..self.v).into_par_iter().find_map_any(|x| {
            (x + 1..self.v).find_map(|y| {
                let l = overlap(&self.rows[x], &self.rows[y]);
                (l != params.lambda).then_some((x, y, l))
            })
        });
        if let Some((x, y, l)) = bad {
            return Err(Error::DesignCheck(format!(
                "points {x} and {y} share {l} blocks, expected {}",
                params.lambda
            )));
        }
        Ok(())
    }
}

fn overlap(a: &[bool], b: &[bool]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| **x && **y).count() as u64
}

fn distance(a: &[bool], b: &[bool]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

/// A design built from the orbit of one block.
#[derive(Clone, Debug)]
pub struct OrbitDesign {
    pub params: DesignParams,
    /// Distinct blocks, ascending as bitmasks.
    pub blocks: Vec<SubsetBitmask>,
    pub matrix: IncidenceMatrix,
    /// `G_B`.
    pub stabilizer: SubgroupDesc,
}

/// The design `{σ(B) : σ ∈ AGL(1, F_q)}` with parameters
/// `v = q`, `b = q(q-1)/|G_B|`, `r = bk/v`, `λ = r(k-1)/(v-1)`.
pub fn orbit_design(field: &Field, block: &SubsetBitmask, config: &OracleConfig) -> Result<OrbitDesign> {
    let q = field.q() as u64;
    let k = block.len();
    if k < 2 {
        return Err(Error::DegenerateDesign(format!("block size {k} < 2")));
    }
    if k == q {
        return Err(Error::DegenerateDesign("the block is the whole point set".into()));
    }
    let stab = stabilizer(field, block, config)?;
    let order = stab.order(field);
    let b = q * (q - 1) / order;
    let r = b * k / q;
    let params = DesignParams {
        v: q,
        b,
        r,
        k,
        lambda: r * (k - 1) / (q - 1),
    };
    params.validate()?;

    let mut blocks: Vec<SubsetBitmask> = field
        .elements()
        .skip(1)
        .flat_map(|a| field.elements().map(move |c| AffineMap::new(a, c).expect("a != 0")))
        .map(|m| block.image(field, &m))
        .collect();
    blocks.sort();
    blocks.dedup();
    if blocks.len() as u64 != b {
        return Err(Error::DesignCheck(format!(
            "{} distinct blocks, expected |G|/|G_B| = {b}",
            blocks.len()
        )));
    }
    let matrix = IncidenceMatrix::from_blocks(field.q(), &blocks);
    matrix.check(&params)?;
    Ok(OrbitDesign {
        params,
        blocks,
        matrix,
        stabilizer: stab,
    })
}

/// `(n, d, w)` and the number of codewords.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CodeParams {
    pub n: u64,
    pub d: u64,
    pub w: u64,
    pub size: u64,
}

/// The rows of the incidence matrix as a code of length `b`, weight `r` and
/// minimum distance `2(r - λ)`; the distance is measured, not assumed.
pub fn design_to_code(params: &DesignParams, matrix: &IncidenceMatrix) -> Result<(CodeParams, Vec<String>)> {
    if matrix.v() < 2 {
        return Err(Error::DegenerateDesign("fewer than two codewords".into()));
    }
    let rows = matrix.rows();
    for (x, row) in rows.iter().enumerate() {
        let w = row.iter().filter(|&&e| e).count() as u64;
        if w != params.r {
            return Err(Error::DesignCheck(format!("row {x} has weight {w}, expected r = {}", params.r)));
        }
    }
    let measured = (0..rows.len())
        .into_par_iter()
        .flat_map_iter(|x| (x + 1..rows.len()).map(move |y| (x, y)))
        .map(|(x, y)| distance(&rows[x], &rows[y]))
        .min()
        .expect("at least one pair");
    if measured == 0 {
        return Err(Error::DesignCheck("two rows are equal".into()));
    }
    let expected = 2 * (params.r - params.lambda);
    if measured != expected {
        return Err(Error::DesignCheck(format!(
            "minimum distance {measured}, expected 2(r - lambda) = {expected}"
        )));
    }
    let code = CodeParams {
        n: matrix.b() as u64,
        d: measured,
        w: params.r,
        size: matrix.v() as u64,
    };
    let words = rows
        .iter()
        .map(|row| row.iter().map(|&e| if e { '1' } else { '0' }).collect())
        .collect();
    Ok((code, words))
}

/// Whether `size = nδ / (w² - nw + nδ)` exactly, `δ = d/2`.
pub fn johnson_check(code: &CodeParams) -> Result<bool> {
    let (n, w) = (code.n as i128, code.w as i128);
    let delta = code.d as i128 / 2;
    let den = w * w - n * w + n * delta;
    if den <= 0 {
        return Err(Error::JohnsonInapplicable(den));
    }
    Ok(code.size as i128 * den == n * delta)
}

/// `A₂(q(q-1)/s, 2k(q-k)/s, k(q-1)/s) = q`, witnessed by a class of
/// subgroups of order `s` that stabilise some `k`-subset exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A2Determination {
    pub code: CodeParams,
    pub witness: SubgroupClass,
}

impl std::fmt::Display for A2Determination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "A2({}, {}, {}) = {}", self.code.n, self.code.d, self.code.w, self.code.size)
    }
}

pub fn a2_determinations(q: u64, k: u64, s: u64) -> Result<A2Determination> {
    let (p, alpha) = prime_power(q)?;
    let g = q * (q - 1);
    if s == 0 || g % s != 0 {
        return Err(Error::NoWitness(format!("{s} does not divide |AGL(1, F_{q})| = {g}")));
    }
    if k > q {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds q = {q}")));
    }
    let mut witness = None;
    for class in SubgroupClass::all(p, alpha)? {
        if class.group_order() == s && !class.count(k)?.is_zero() {
            witness = Some(class);
            break;
        }
    }
    let witness =
        witness.ok_or_else(|| Error::NoWitness(format!("no subgroup of order {s} is the exact stabilizer of a {k}-subset")))?;
    let integral = |num: u64, what: &str| {
        if num % s == 0 {
            Ok(num / s)
        } else {
            Err(Error::DesignCheck(format!("{what} = {num}/{s} is not an integer")))
        }
    };
    let code = CodeParams {
        n: integral(g, "n")?,
        d: integral(2 * k * (q - k), "d")?,
        w: integral(k * (q - 1), "w")?,
        size: q,
    };
    Ok(A2Determination { code, witness })
}

/// One block per line, members as ascending element indices.
pub fn blocks_text(blocks: &[SubsetBitmask]) -> String {
    let mut out = String::new();
    for blk in blocks {
        let line = blk.elements().iter().map(|x| x.index().to_string()).collect::<Vec<_>>().join(" ");
        writeln!(out, "{line}").expect("write to String");
    }
    out
}

#[derive(Serialize)]
struct DesignJson<'a> {
    params: &'a DesignParams,
    blocks: Vec<Vec<u32>>,
    codewords: &'a [String],
}

/// `{params, blocks, codewords}`; codeword bits follow the block order.
pub fn design_json(design: &OrbitDesign, codewords: &[String]) -> serde_json::Value {
    let blocks = design
        .blocks
        .iter()
        .map(|b| b.elements().iter().map(|x| x.index()).collect())
        .collect();
    serde_json::to_value(DesignJson {
        params: &design.params,
        blocks,
        codewords,
    })
    .expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn cfg() -> OracleConfig {
        OracleConfig::default()
    }

    #[test]
    fn q7_design_and_code() {
        let f = Field::new(7, 1).unwrap();
        let b = SubsetBitmask::from_indices(&f, &[1, 2, 4]).unwrap();
        let d = orbit_design(&f, &b, &cfg()).unwrap();
        assert_eq!(
            d.params,
            DesignParams {
                v: 7,
                b: 14,
                r: 6,
                k: 3,
                lambda: 2
            }
        );
        assert_eq!(d.stabilizer.order(&f), 3);
        let (code, words) = design_to_code(&d.params, &d.matrix).unwrap();
        assert_eq!(code, CodeParams { n: 14, d: 8, w: 6, size: 7 });
        assert_eq!(words.len(), 7);
        assert!(words.iter().all(|w| w.len() == 14 && w.matches('1').count() == 6));
        assert!(johnson_check(&code).unwrap());
        assert!(!johnson_check(&CodeParams { size: 6, ..code }).unwrap());
    }

    #[test]
    fn degenerate_blocks_rejected() {
        let f = Field::new(7, 1).unwrap();
        for idx in [vec![], vec![3], (0..7).collect::<Vec<u64>>()] {
            let b = SubsetBitmask::from_indices(&f, &idx).unwrap();
            assert!(matches!(orbit_design(&f, &b, &cfg()), Err(Error::DegenerateDesign(_))));
        }
    }

    #[test]
    fn equal_rows_rejected() {
        let m = IncidenceMatrix::from_rows(vec![vec![true, false, true], vec![true, false, true]]).unwrap();
        let p = DesignParams {
            v: 2,
            b: 3,
            r: 2,
            k: 2,
            lambda: 2,
        };
        assert!(matches!(design_to_code(&p, &m), Err(Error::DesignCheck(_))));
        let one = IncidenceMatrix::from_rows(vec![vec![true]]).unwrap();
        assert!(design_to_code(&p, &one).is_err());
    }

    #[test]
    fn johnson_inapplicable() {
        // w² - nw + nδ = 25 - 50 + 10 < 0
        let c = CodeParams { n: 10, d: 2, w: 5, size: 1 };
        assert!(matches!(johnson_check(&c), Err(Error::JohnsonInapplicable(-15))));
    }

    #[test]
    fn a2_examples() {
        let a = a2_determinations(7, 3, 3).unwrap();
        assert_eq!(a.code, CodeParams { n: 14, d: 8, w: 6, size: 7 });
        assert_eq!(a.to_string(), "A2(14, 8, 6) = 7");
        let b = a2_determinations(7, 3, 2).unwrap();
        assert_eq!(b.code, CodeParams { n: 21, d: 12, w: 9, size: 7 });
        assert!(matches!(a2_determinations(7, 3, 5), Err(Error::NoWitness(_))));
        // order 1 never stabilizes a 3-subset of F_7 exactly
        assert!(matches!(a2_determinations(7, 3, 1), Err(Error::NoWitness(_))));
    }

    #[test]
    fn orbit_designs_small_fields() {
        for q in [4u64, 5, 7, 8] {
            let f = Field::with_order(q).unwrap();
            for k in 2..q {
                for xs in (0..q).combinations(k as usize) {
                    let b = SubsetBitmask::from_indices(&f, &xs).unwrap();
                    let d = orbit_design(&f, &b, &cfg()).unwrap();
                    assert!(d.blocks.contains(&b));
                    let (code, _) = design_to_code(&d.params, &d.matrix).unwrap();
                    assert!(johnson_check(&code).unwrap(), "q = {q}, {xs:?}");
                    // the A2 arguments come out integral for the stabilizer's order
                    let a2 = a2_determinations(q, k, d.stabilizer.order(&f)).unwrap();
                    assert_eq!(a2.code, code);
                }
            }
        }
    }

    #[test]
    fn output_formats() {
        let f = Field::new(7, 1).unwrap();
        let b = SubsetBitmask::from_indices(&f, &[1, 2, 4]).unwrap();
        let d = orbit_design(&f, &b, &cfg()).unwrap();
        let text = blocks_text(&d.blocks);
        assert_eq!(text.lines().count(), 14);
        assert_eq!(text.lines().next(), Some("0 1 3"));
        let (_, words) = design_to_code(&d.params, &d.matrix).unwrap();
        let json = design_json(&d, &words);
        assert_eq!(json["params"]["lambda"], 2);
        assert_eq!(json["blocks"].as_array().unwrap().len(), 14);
        assert_eq!(json["codewords"][0].as_str().unwrap().len(), 14);
    }
}
