//! Rank-one magnitude test, twin classes, the pair `(C, D)` and its normal form.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Witness;
use crate::cyclotomic::{CycNum, Rational};
use crate::linalg;
use crate::model::{bipartite_split, BipartiteSplit, PureMatrix};

/// Magnitude factorisation of a connected component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step1 {
    pub bipartite: bool,
    /// `c` with `|A_xy| = c κ_x κ_y`; one for bipartite components.
    pub scale: Rational,
    /// Component-local indices of each side; one side when non-bipartite.
    pub sides: Vec<Vec<usize>>,
    /// Per-side magnitude values, aligned with `sides`.
    pub values: Vec<Vec<Rational>>,
    /// Order of the root parts.
    pub n: u64,
    /// Root exponents mod `n`: rows follow `sides[0]`, columns the last side.
    pub s: Vec<Vec<u64>>,
}

fn magnitude_rank(rows: &[Vec<Rational>]) -> usize {
    linalg::rank(&rows.to_vec())
}

/// Test the rank-one condition on `|A|` (or on the bipartite block `|B|`).
pub fn step1_bulatov_grohe(a: &PureMatrix) -> Result<Step1, Witness> {
    let fail = |detail: String| Witness::new("step1", "bulatov-grohe", detail);
    let n = a.working_conductor();
    match bipartite_split(a) {
        BipartiteSplit::Bipartite { left, right, block } => {
            let mags: Vec<Vec<Rational>> = block
                .iter()
                .map(|r| r.iter().map(|e| e.magnitude().clone()).collect())
                .collect();
            let rank = magnitude_rank(&mags);
            if rank != 1 || mags.iter().flatten().any(|x| x.is_zero()) {
                return Err(fail(format!("bipartite block |B| has rank {rank}")));
            }
            let b00 = mags[0][0].clone();
            let mu: Vec<Rational> = mags.iter().map(|r| r[0].clone()).collect();
            let nu: Vec<Rational> = mags[0].iter().map(|x| x / &b00).collect();
            let s = block
                .iter()
                .map(|r| r.iter().map(|e| e.exponent_in(n)).collect())
                .collect();
            Ok(Step1 {
                bipartite: true,
                scale: Rational::one(),
                sides: vec![left, right],
                values: vec![mu, nu],
                n,
                s,
            })
        }
        BipartiteSplit::NonBipartite => {
            let m = a.dim();
            let mags: Vec<Vec<Rational>> = (0..m)
                .map(|i| (0..m).map(|j| a.get(i, j).magnitude().clone()).collect())
                .collect();
            let rank = magnitude_rank(&mags);
            if rank > 1 || mags[0][0].is_zero() {
                return Err(fail(format!("|A| has rank {rank}")));
            }
            let c = mags[0][0].clone();
            let kappa: Vec<Rational> = (0..m).map(|i| &mags[i][0] / &c).collect();
            let s = (0..m)
                .map(|i| (0..m).map(|j| a.get(i, j).exponent_in(n)).collect())
                .collect();
            Ok(Step1 {
                bipartite: false,
                scale: c,
                sides: vec![(0..m).collect()],
                values: vec![kappa],
                n,
                s,
            })
        }
    }
}

/// Ordering, magnitude groups and twin classes of one side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideStructure {
    /// Positions into `Step1::sides[s]`, sorted by value (descending, stable).
    pub order: Vec<usize>,
    pub group_values: Vec<Rational>,
    /// Group of each sorted position.
    pub group_of: Vec<usize>,
    /// Twin class of each sorted position.
    pub class_of: Vec<usize>,
    /// `k` with line `= ω_N^k · line(rep)` for each sorted position.
    pub shift: Vec<u64>,
    /// Sorted position of each class representative.
    pub reps: Vec<usize>,
}

/// The pair `(C, D)` built from a component that passed step 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdPair {
    pub step1: Step1,
    pub sides: Vec<SideStructure>,
    pub h: usize,
    /// Root exponents mod `N` of the class matrix `H`.
    pub hmat: Vec<Vec<u64>>,
    /// `D^{[r]}_{(i,j)}` indexed `[side][r][group][class]`.
    pub d: Vec<Vec<Vec<Vec<CycNum>>>>,
}

impl CdPair {
    pub fn num_sides(&self) -> usize {
        self.sides.len()
    }
}

/// `Σ_k ω_N^{e_k}` over a list of exponents.
pub(crate) fn root_sum(n: u64, exps: impl IntoIterator<Item = u64>) -> CycNum {
    let mut counts = vec![BigInt::zero(); n as usize];
    for e in exps {
        counts[(e % n) as usize] += 1;
    }
    CycNum::from_exponent_counts(n, counts)
}

fn sort_side(values: &[Rational]) -> (Vec<usize>, Vec<Rational>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].cmp(&values[a]));
    let mut group_values: Vec<Rational> = Vec::new();
    let mut group_of = Vec::with_capacity(order.len());
    for &o in &order {
        if group_values.last() != Some(&values[o]) {
            group_values.push(values[o].clone());
        }
        group_of.push(group_values.len() - 1);
    }
    (order, group_values, group_of)
}

/// Classify lines (sorted order) into twin classes; lines of distinct classes
/// must be orthogonal on every block of `other_groups`.
fn twin_classes(
    lines: &[Vec<u64>],
    other_groups: &[usize],
    n: u64,
    group_of: &[usize],
) -> Result<(Vec<usize>, Vec<u64>, Vec<usize>), Witness> {
    let num_blocks = other_groups.iter().max().map_or(0, |g| g + 1);
    let mut reps: Vec<usize> = Vec::new();
    let mut class_of = Vec::with_capacity(lines.len());
    let mut shift = Vec::with_capacity(lines.len());
    for (x, line) in lines.iter().enumerate() {
        let mut found = None;
        for (c, &r) in reps.iter().enumerate() {
            let diff: Vec<u64> = line
                .iter()
                .zip(&lines[r])
                .map(|(a, b)| (a + n - b) % n)
                .collect();
            if diff.iter().all(|&d| d == diff[0]) {
                found = Some((c, diff[0]));
                break;
            }
            for blk in 0..num_blocks {
                let sum = root_sum(
                    n,
                    diff.iter()
                        .zip(other_groups)
                        .filter(|(_, &g)| g == blk)
                        .map(|(&d, _)| d),
                );
                if !sum.is_zero() {
                    return Err(Witness::new(
                        "step2",
                        "orthogonality",
                        format!("lines {r} and {x} are neither parallel nor orthogonal on block {blk}"),
                    ));
                }
            }
        }
        match found {
            Some((c, k)) => {
                class_of.push(c);
                shift.push(k);
            }
            None => {
                if group_of[x] != 0 {
                    return Err(Witness::new(
                        "step2",
                        "orthogonality",
                        format!("twin class of line {x} misses the first magnitude group"),
                    ));
                }
                class_of.push(reps.len());
                shift.push(0);
                reps.push(x);
            }
        }
    }
    Ok((class_of, shift, reps))
}

/// Group the sides, split them into twin classes and form `H` and `D`.
pub fn step2_build_cd(step1: &Step1) -> Result<CdPair, Witness> {
    let n = step1.n;
    let sorted: Vec<_> = step1.values.iter().map(|v| sort_side(v)).collect();
    let rows = &sorted[0];
    let cols = &sorted[sorted.len() - 1];
    let row_lines: Vec<Vec<u64>> = rows
        .0
        .iter()
        .map(|&x| cols.0.iter().map(|&y| step1.s[x][y]).collect())
        .collect();
    let mut sides = Vec::new();
    let (class_of, shift, reps) = twin_classes(&row_lines, &cols.2, n, &rows.2)?;
    sides.push(SideStructure {
        order: rows.0.clone(),
        group_values: rows.1.clone(),
        group_of: rows.2.clone(),
        class_of,
        shift,
        reps,
    });
    if step1.bipartite {
        let col_lines: Vec<Vec<u64>> = (0..cols.0.len())
            .map(|y| row_lines.iter().map(|r| r[y]).collect())
            .collect();
        let (class_of, shift, reps) = twin_classes(&col_lines, &rows.2, n, &cols.2)?;
        sides.push(SideStructure {
            order: cols.0.clone(),
            group_values: cols.1.clone(),
            group_of: cols.2.clone(),
            class_of,
            shift,
            reps,
        });
    }
    let h = sides[0].reps.len();
    let hc = sides[sides.len() - 1].reps.len();
    if h != hc {
        return Err(Witness::new(
            "step2",
            "orthogonality",
            format!("{h} row classes but {hc} column classes"),
        ));
    }
    let last = sides.len() - 1;
    let hmat: Vec<Vec<u64>> = sides[0]
        .reps
        .iter()
        .map(|&x| sides[last].reps.iter().map(|&y| row_lines[x][y]).collect())
        .collect();
    let d = sides
        .iter()
        .map(|side| {
            let groups = side.group_values.len();
            // exponent multiset per (group, class)
            let mut cells: Vec<Vec<Vec<u64>>> = vec![vec![Vec::new(); h]; groups];
            for x in 0..side.order.len() {
                cells[side.group_of[x]][side.class_of[x]].push(side.shift[x]);
            }
            (0..n)
                .map(|r| {
                    cells
                        .iter()
                        .map(|row| {
                            row.iter()
                                .map(|ks| root_sum(n, ks.iter().map(|k| k * r % n)))
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(CdPair {
        step1: step1.clone(),
        sides,
        h,
        hmat,
        d,
    })
}

/// Rank-one factorisation `D^{[r]} = K^{[r]} ⊗ L^{[r]}` of each side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shapes {
    /// `[side][r][group]`.
    pub k: Vec<Vec<Vec<CycNum>>>,
    /// `[side][r][class]`.
    pub l: Vec<Vec<Vec<CycNum>>>,
    /// Class `a_r` with `L^{[r]}_{a_r} = 1`, or `None` when `D^{[r]} = 0`.
    pub pivots: Vec<Vec<Option<usize>>>,
}

/// Check that `H` is unitary and that every `D^{[r]}` has the required shape.
pub fn step2_check_shapes(cd: &CdPair) -> Result<Shapes, Witness> {
    let n = cd.step1.n;
    let h = cd.h;
    let hm = &cd.hmat;
    for i in 0..h {
        for j in i + 1..h {
            let rows = root_sum(n, (0..h).map(|k| hm[i][k] + n - hm[j][k]));
            let cols = root_sum(n, (0..h).map(|k| hm[k][i] + n - hm[k][j]));
            if !rows.is_zero() || !cols.is_zero() {
                return Err(Witness::new(
                    "step2",
                    "shape4",
                    format!("class matrix is not orthogonal at ({i}, {j})"),
                ));
            }
        }
    }
    let mut shapes = Shapes {
        k: Vec::new(),
        l: Vec::new(),
        pivots: Vec::new(),
    };
    for (s, dside) in cd.d.iter().enumerate() {
        for (i, row) in dside[0].iter().enumerate() {
            if row.iter().any(|z| z != &row[0]) {
                return Err(Witness::new(
                    "step2",
                    "shape5",
                    format!("side {s}: D^[0] is not constant on group {i}"),
                ));
            }
        }
        let (mut ks, mut ls, mut ps) = (Vec::new(), Vec::new(), Vec::new());
        for (r, dr) in dside.iter().enumerate() {
            let groups = dr.len();
            let zero = CycNum::zero(n);
            let pivot = (0..groups).find_map(|a| dr[a].iter().position(|z| !z.is_zero()).map(|b| (a, b)));
            let Some((a, b)) = pivot else {
                ks.push(vec![zero.clone(); groups]);
                ls.push(vec![zero.clone(); h]);
                ps.push(None);
                continue;
            };
            let dab = &dr[a][b];
            let dab_norm = dab.norm_sq();
            for (i, row) in dr.iter().enumerate() {
                for (j, z) in row.iter().enumerate() {
                    if &(z * dab) != &(&dr[i][b] * &dr[a][j]) {
                        return Err(Witness::new(
                            "step2",
                            "shape6",
                            format!("side {s}: D^[{r}] is not of rank one at ({i}, {j})"),
                        ));
                    }
                }
            }
            let mut l = Vec::with_capacity(h);
            for (j, z) in dr[a].iter().enumerate() {
                let nz = z.norm_sq();
                if !z.is_zero() && nz != dab_norm {
                    return Err(Witness::new(
                        "step2",
                        "shape6",
                        format!("side {s}: L^[{r}] entry {j} has modulus other than 0 or 1"),
                    ));
                }
                l.push(z.div(dab).expect("pivot entry is nonzero"));
            }
            ks.push((0..groups).map(|i| dr[i][b].clone()).collect());
            ls.push(l);
            ps.push(Some(b));
        }
        shapes.k.push(ks);
        shapes.l.push(ls);
        shapes.pivots.push(ps);
    }
    Ok(shapes)
}

/// `(C, D)` rewritten with `H_11 = 1` on the first row and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub n: u64,
    /// `N` if even, `2N` otherwise.
    pub n_prime: u64,
    /// Exponent of `H_11` mod `N`.
    pub h11: u64,
    /// `[side][class]`: exponent of `α_j` (rows) or `β_j` (columns) mod `N`.
    pub alpha: Vec<Vec<u64>>,
    /// Exponents of `X` mod `N'`.
    pub x: Vec<Vec<u64>>,
    /// `[side][r]`: exponent of `α_{a_r}^r` mod `N`, `None` when `D^{[r]} = 0`.
    pub vertex_exp: Vec<Vec<Option<u64>>>,
    /// `[side][r'][class]` for `r'` in `0..N'`.
    pub y: Vec<Vec<Vec<CycNum>>>,
}

pub fn step2_normalize(cd: &CdPair, shapes: &Shapes) -> Normalized {
    let n = cd.step1.n;
    let n_prime = if n % 2 == 0 { n } else { 2 * n };
    let lift = n_prime / n;
    let hm = &cd.hmat;
    let h = cd.h;
    let h11 = hm[0][0];
    let row_alpha: Vec<u64> = (0..h).map(|j| (hm[j][0] + n - h11) % n).collect();
    let col_alpha: Vec<u64> = (0..h).map(|j| (hm[0][j] + n - h11) % n).collect();
    let alpha = if cd.num_sides() == 2 {
        vec![row_alpha.clone(), col_alpha.clone()]
    } else {
        vec![row_alpha.clone()]
    };
    let x = (0..h)
        .map(|i| {
            (0..h)
                .map(|j| (hm[i][j] + 3 * n - row_alpha[i] - col_alpha[j] - h11) % n * lift)
                .collect()
        })
        .collect();
    let mut vertex_exp = Vec::new();
    let mut y = Vec::new();
    for (s, al) in alpha.iter().enumerate() {
        vertex_exp.push(
            (0..n)
                .map(|r| shapes.pivots[s][r as usize].map(|a| r * al[a] % n))
                .collect(),
        );
        y.push(
            (0..n_prime)
                .map(|rp| {
                    let r = rp % n;
                    let l = &shapes.l[s][r as usize];
                    match shapes.pivots[s][r as usize] {
                        None => vec![CycNum::zero(n); h],
                        Some(a) => (0..h)
                            .map(|j| &l[j] * &CycNum::root(n, r * (al[j] + n - al[a]) % n))
                            .collect(),
                    }
                })
                .collect(),
        );
    }
    Normalized {
        n,
        n_prime,
        h11,
        alpha,
        x,
        vertex_exp,
        y,
    }
}

/// Map each exponent vector to its index.
pub(crate) fn index_of(lines: &[Vec<u64>]) -> HashMap<Vec<u64>, usize> {
    lines.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect()
}
