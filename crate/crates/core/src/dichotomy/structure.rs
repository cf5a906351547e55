//! Group condition, Fourier decomposition, coset supports and the shift test.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::steps::{index_of, CdPair, Normalized};
use super::Witness;
use crate::arith::{factorize, gcd, lcm, mod_inv, mod_mul};
use crate::lattice::{coset_detect, coset_prime_split, uniform_map, Coset, UniformMap};

/// One cyclic (or 2-generated, for the prime 2) factor of the decomposition.
/// The pairing on the block is `ω_q^{x^T form y}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourierBlock {
    pub prime: u64,
    pub modulus: u64,
    pub form: Vec<Vec<u64>>,
}

/// `X_{a,b} = Π_blocks ω_q^{x_a^T W y_b}` with explicit coordinates per class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fourier {
    pub blocks: Vec<FourierBlock>,
    /// `[side][class]` coordinate vectors; one side when the pairing is symmetric.
    pub coords: Vec<Vec<Vec<u64>>>,
}

impl Fourier {
    pub fn moduli(&self) -> Vec<u64> {
        self.blocks
            .iter()
            .flat_map(|b| std::iter::repeat(b.modulus).take(b.form.len()))
            .collect()
    }

    /// Exponent of `ω_{n'}` for the pairing of row coordinates `x` and column coordinates `y`.
    pub fn pairing(&self, x: &[u64], y: &[u64], n_prime: u64) -> u64 {
        let mut total = 0u64;
        let mut at = 0;
        for b in &self.blocks {
            let d = b.form.len();
            let mut e = 0u64;
            for i in 0..d {
                for j in 0..d {
                    e = (e + mod_mul(mod_mul(x[at + i], b.form[i][j], b.modulus), y[at + j], b.modulus))
                        % b.modulus;
                }
            }
            total = (total + e * (n_prime / b.modulus)) % n_prime;
            at += d;
        }
        total
    }

    /// Coefficient `c_ij` of `x_i y_j` (zero across blocks) and the modulus of coordinate `i`.
    pub fn coefficient(&self, i: usize, j: usize) -> (u64, u64) {
        let mut at = 0;
        for b in &self.blocks {
            let d = b.form.len();
            if i < at + d {
                if j >= at && j < at + d {
                    return (b.form[i - at][j - at], b.modulus);
                }
                return (0, b.modulus);
            }
            at += d;
        }
        panic!("coordinate {i} out of range")
    }
}

fn order_of(e: u64, n: u64) -> u64 {
    n / gcd(e % n, n)
}

struct Pairing<'a> {
    x: &'a [Vec<u64>],
    n: u64,
    symmetric: bool,
}

impl Pairing<'_> {
    fn e(&self, a: usize, b: usize) -> u64 {
        self.x[a][b]
    }
}

/// Generators of the decomposition for one prime, with the coordinate rule.
enum Gen {
    /// Bipartite cyclic factor generated by row `a` and column `b`; `k = E(a,b)` in units.
    Pair { a: usize, b: usize, q: u64, k: u64 },
    /// Symmetric cyclic factor with `E(a,a) = k` in units.
    Diag { a: usize, q: u64, k: u64 },
    /// Symmetric 2-dimensional factor for the prime 2.
    Plane { a: usize, b: usize, q: u64, w: [[u64; 2]; 2] },
}

fn decompose_prime(pr: &Pairing, s0: &[usize], t0: &[usize]) -> Result<Vec<Gen>, String> {
    let n = pr.n;
    let mut s = s0.to_vec();
    let mut t = t0.to_vec();
    let mut gens = Vec::new();
    while s.len() > 1 {
        let q = s
            .iter()
            .flat_map(|&a| t.iter().map(move |&b| (a, b)))
            .map(|(a, b)| order_of(pr.e(a, b), n))
            .max()
            .unwrap_or(1);
        if q == 1 {
            return Err("degenerate pairing".into());
        }
        let unit = n / q;
        let old = s.len();
        if pr.symmetric {
            if let Some(&a) = s.iter().find(|&&a| order_of(pr.e(a, a), n) == q) {
                gens.push(Gen::Diag { a, q, k: pr.e(a, a) / unit });
                s.retain(|&u| pr.e(u, a) == 0);
            } else {
                let (a, b) = s
                    .iter()
                    .flat_map(|&a| s.iter().map(move |&b| (a, b)))
                    .find(|&(a, b)| order_of(pr.e(a, b), n) == q)
                    .ok_or("no generator pair")?;
                let w = [
                    [pr.e(a, a) / unit, pr.e(a, b) / unit],
                    [pr.e(b, a) / unit, pr.e(b, b) / unit],
                ];
                gens.push(Gen::Plane { a, b, q, w });
                s.retain(|&u| pr.e(u, a) == 0 && pr.e(u, b) == 0);
            }
            t = s.clone();
        } else {
            let (a, b) = s
                .iter()
                .flat_map(|&a| t.iter().map(move |&b| (a, b)))
                .find(|&(a, b)| order_of(pr.e(a, b), n) == q)
                .expect("maximum is attained");
            gens.push(Gen::Pair { a, b, q, k: pr.e(a, b) / unit });
            s.retain(|&u| pr.e(u, b) == 0);
            t.retain(|&v| pr.e(a, v) == 0);
        }
        let factor = match gens.last() {
            Some(Gen::Plane { q, .. }) => q * q,
            _ => q,
        };
        if s.len() * factor as usize != old {
            return Err(format!("factor of order {factor} does not split off"));
        }
    }
    Ok(gens)
}

fn inverse_2x2(w: &[[u64; 2]; 2], q: u64) -> Option<[[u64; 2]; 2]> {
    let det = (mod_mul(w[0][0], w[1][1], q) + q - mod_mul(w[0][1], w[1][0], q)) % q;
    let di = mod_inv(det, q)?;
    Some([
        [mod_mul(w[1][1], di, q), mod_mul((q - w[0][1] % q) % q, di, q)],
        [mod_mul((q - w[1][0] % q) % q, di, q), mod_mul(w[0][0], di, q)],
    ])
}

/// Decompose the pairing given by the exponent matrix `x` (entries mod `n`).
pub fn fourier_decompose(x: &[Vec<u64>], n: u64, symmetric: bool) -> Result<Fourier, String> {
    let h = x.len();
    let rows: Vec<Vec<u64>> = x.to_vec();
    let cols: Vec<Vec<u64>> = (0..h).map(|j| x.iter().map(|r| r[j]).collect()).collect();
    let row_idx = index_of(&rows);
    let col_idx = index_of(&cols);
    if row_idx.len() != h || col_idx.len() != h {
        return Err("repeated lines".into());
    }
    let exponent = x.iter().flatten().fold(1, |acc, &e| lcm(acc, order_of(e, n)));
    let pr = Pairing { x, n, symmetric };
    let scale = |v: &[u64], c: u64| -> Vec<u64> { v.iter().map(|&e| mod_mul(e, c, n)).collect() };
    let mut blocks = Vec::new();
    let mut row_coords = vec![Vec::new(); h];
    let mut col_coords = vec![Vec::new(); h];
    for (p, e) in factorize(exponent) {
        let pe = p.pow(e);
        let rest = exponent / pe;
        let c = mod_mul(rest, mod_inv(rest % pe, pe).unwrap_or(1), exponent);
        let proj = |lines: &[Vec<u64>], idx: &HashMap<Vec<u64>, usize>, a: usize| -> Result<usize, String> {
            idx.get(&scale(&lines[a], c))
                .copied()
                .ok_or_else(|| "lines not closed under powers".to_string())
        };
        let row_proj: Vec<usize> = (0..h).map(|a| proj(&rows, &row_idx, a)).collect::<Result<_, _>>()?;
        let col_proj: Vec<usize> = (0..h).map(|b| proj(&cols, &col_idx, b)).collect::<Result<_, _>>()?;
        let mut s: Vec<usize> = row_proj.iter().copied().collect::<HashSet<_>>().into_iter().collect();
        let mut t: Vec<usize> = col_proj.iter().copied().collect::<HashSet<_>>().into_iter().collect();
        s.sort_unstable();
        t.sort_unstable();
        for g in decompose_prime(&pr, &s, &t)? {
            match g {
                Gen::Pair { a, b, q, k } => {
                    let unit = n / q;
                    let ki = mod_inv(k, q).ok_or("non-unit pairing")?;
                    blocks.push(FourierBlock { prime: p, modulus: q, form: vec![vec![1]] });
                    for u in 0..h {
                        row_coords[u].push(x[row_proj[u]][b] / unit % q);
                        col_coords[u].push(mod_mul(x[a][col_proj[u]] / unit, ki, q));
                    }
                }
                Gen::Diag { a, q, k } => {
                    let unit = n / q;
                    let ki = mod_inv(k, q).ok_or("non-unit pairing")?;
                    blocks.push(FourierBlock { prime: p, modulus: q, form: vec![vec![k]] });
                    for u in 0..h {
                        let v = mod_mul(x[row_proj[u]][a] / unit, ki, q);
                        row_coords[u].push(v);
                        col_coords[u].push(v);
                    }
                }
                Gen::Plane { a, b, q, w } => {
                    let unit = n / q;
                    let wi = inverse_2x2(&w, q).ok_or("singular 2x2 block")?;
                    blocks.push(FourierBlock {
                        prime: p,
                        modulus: q,
                        form: vec![w[0].to_vec(), w[1].to_vec()],
                    });
                    for u in 0..h {
                        let e = [x[row_proj[u]][a] / unit, x[row_proj[u]][b] / unit];
                        for row in wi {
                            let v = (mod_mul(row[0], e[0], q) + mod_mul(row[1], e[1], q)) % q;
                            row_coords[u].push(v);
                            col_coords[u].push(v);
                        }
                    }
                }
            }
        }
    }
    let f = Fourier {
        blocks,
        coords: if symmetric {
            vec![row_coords]
        } else {
            vec![row_coords, col_coords]
        },
    };
    let size: u64 = f.moduli().iter().product();
    for side in &f.coords {
        if size != h as u64 || side.iter().collect::<HashSet<_>>().len() != h {
            return Err("coordinates are not a bijection".into());
        }
    }
    let last = f.coords.len() - 1;
    for a in 0..h {
        for b in 0..h {
            if f.pairing(&f.coords[0][a], &f.coords[last][b], n) != x[a][b] {
                return Err(format!("decomposition disagrees at ({a}, {b})"));
            }
        }
    }
    Ok(f)
}

/// Shift data for one generator of a uniform map: `Y'_{x+a} = Y'_x F(x,b) ω^α`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shift {
    /// `b` on the coordinates of the prime.
    pub b: Vec<u64>,
    /// Exponent of `ω_{N'}`.
    pub alpha: u64,
}

/// The part of a support coset on one prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePart {
    pub prime: u64,
    pub coords: Vec<usize>,
    pub pi_hat: u64,
    pub map: UniformMap,
    pub shifts: Vec<Shift>,
}

/// Support and pivot of `Y'^{[r]}` on one side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassData {
    pub side: usize,
    pub r: u64,
    pub support: Coset,
    pub pivot: Vec<u64>,
    pub primes: Vec<PrimePart>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure {
    /// `[side][r'][class]` exponents of `Y'` mod `N'`.
    pub y: Vec<Vec<Vec<Option<u64>>>>,
    pub fourier: Fourier,
    pub classes: Vec<ClassData>,
}

impl Structure {
    pub fn class(&self, side: usize, r: u64) -> Option<&ClassData> {
        self.classes.iter().find(|c| c.side == side && c.r == r)
    }
}

/// `F` between a point of `side` and a point `b` of the opposite side.
pub(crate) fn cross_pairing(f: &Fourier, side: usize, x: &[u64], b: &[u64], n: u64) -> u64 {
    if side == 0 {
        f.pairing(x, b, n)
    } else {
        f.pairing(b, x, n)
    }
}

/// `π̂` for the coordinates of one prime.
pub(crate) fn pi_hat(prime: u64, moduli: &[u64]) -> u64 {
    let pi = moduli.iter().copied().max().unwrap_or(1);
    if prime == 2 {
        2 * pi
    } else {
        pi
    }
}

fn all_vectors(moduli: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for &m in moduli {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..m).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn embed_at(len: usize, coords: &[usize], v: &[u64]) -> Vec<u64> {
    let mut out = vec![0; len];
    for (&i, &x) in coords.iter().zip(v) {
        out[i] = x;
    }
    out
}

fn analyse_class(
    side: usize,
    r: u64,
    ys: &[Option<u64>],
    f: &Fourier,
    n: u64,
) -> Result<Option<ClassData>, Witness> {
    let coset_fail = |d: String| Witness::new("step3", "coset", format!("side {side}, r = {r}: {d}"));
    let d_fail = |d: String| Witness::new("step3", "quadratic", format!("side {side}, r = {r}: {d}"));
    let moduli = f.moduli();
    let coords = &f.coords[side];
    let value: HashMap<&[u64], u64> = coords
        .iter()
        .zip(ys)
        .filter_map(|(c, y)| y.map(|y| (c.as_slice(), y)))
        .collect();
    if value.is_empty() {
        return Ok(None);
    }
    let points: Vec<Vec<u64>> = value.keys().map(|c| c.to_vec()).collect();
    let support = coset_detect(&points, &moduli).ok_or_else(|| coset_fail("support is not a coset".into()))?;
    let mut sorted = points.clone();
    sorted.sort();
    let pivot = sorted
        .iter()
        .find(|c| value[c.as_slice()] == 0)
        .cloned()
        .ok_or_else(|| coset_fail("no support point with value 1".into()))?;
    let parts = coset_prime_split(&support).map_err(|e| coset_fail(e.to_string()))?;
    let ext = |coords_p: &[usize], xp: &[u64]| -> Vec<u64> {
        let mut v = pivot.clone();
        for (&i, &x) in coords_p.iter().zip(xp) {
            v[i] = x;
        }
        v
    };
    for x in &sorted {
        let mut total = 0;
        for part in &parts {
            let xp: Vec<u64> = part.coords.iter().map(|&i| x[i]).collect();
            total = (total + value[ext(&part.coords, &xp).as_slice()]) % n;
        }
        if total != value[x.as_slice()] {
            return Err(d_fail(format!("values do not factor over primes at {x:?}")));
        }
    }
    let mut primes = Vec::new();
    for part in parts {
        let pmod: Vec<u64> = part.coords.iter().map(|&i| moduli[i]).collect();
        let ph = pi_hat(part.prime, &pmod);
        let pivot_p: Vec<u64> = part.coords.iter().map(|&i| pivot[i]).collect();
        let coset = part.coset.rebased(&pivot_p);
        let map = uniform_map(&coset, ph).map_err(|e| coset_fail(e.to_string()))?;
        let candidates = all_vectors(&pmod);
        let mut shifts = Vec::new();
        for g in &map.matrix {
            let shift_by = embed_at(moduli.len(), &part.coords, g);
            let deltas: Vec<(Vec<u64>, u64)> = sorted
                .iter()
                .map(|x| {
                    let moved: Vec<u64> = x
                        .iter()
                        .zip(&shift_by)
                        .zip(&moduli)
                        .map(|((a, b), m)| (a + b) % m)
                        .collect();
                    (x.clone(), (value[moved.as_slice()] + n - value[x.as_slice()]) % n)
                })
                .collect();
            let found = candidates.iter().find_map(|b| {
                let bt = embed_at(moduli.len(), &part.coords, b);
                let fx = |x: &[u64]| cross_pairing(f, side, x, &bt, n);
                let alpha = (deltas[0].1 + n - fx(&deltas[0].0)) % n;
                deltas
                    .iter()
                    .all(|(x, t)| (t + n - fx(x)) % n == alpha)
                    .then(|| Shift { b: b.clone(), alpha })
            });
            shifts.push(found.ok_or_else(|| {
                d_fail(format!("prime {}: shift by {g:?} is not linear", part.prime))
            })?);
        }
        primes.push(PrimePart {
            prime: part.prime,
            coords: part.coords,
            pi_hat: ph,
            map,
            shifts,
        });
    }
    Ok(Some(ClassData {
        side,
        r,
        support,
        pivot,
        primes,
    }))
}

fn closed_under_addition(lines: &[Vec<u64>], n: u64) -> bool {
    let set: HashSet<&Vec<u64>> = lines.iter().collect();
    lines.iter().all(|a| {
        lines.iter().all(|b| {
            let s: Vec<u64> = a.iter().zip(b).map(|(x, y)| (x + y) % n).collect();
            set.contains(&s)
        })
    })
}

/// Run the checks on the normalised pair and collect the data the evaluator needs.
pub fn step3_structure(cd: &CdPair, norm: &Normalized) -> Result<Structure, Witness> {
    let n = norm.n_prime;
    let h = cd.h;
    let mut y = Vec::new();
    for (s, side) in norm.y.iter().enumerate() {
        let mut per_r = Vec::new();
        for (r, vals) in side.iter().enumerate() {
            let mut exps = Vec::with_capacity(h);
            for (j, z) in vals.iter().enumerate() {
                if z.is_zero() {
                    exps.push(None);
                } else {
                    exps.push(Some(z.root_exponent(n).ok_or_else(|| {
                        Witness::new(
                            "step3",
                            "u5",
                            format!("side {s}: Y'^[{r}] entry {j} is not a root of unity"),
                        )
                    })?));
                }
            }
            per_r.push(exps);
        }
        y.push(per_r);
    }
    let rows = norm.x.clone();
    let cols: Vec<Vec<u64>> = (0..h).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    if !closed_under_addition(&rows, n) || !closed_under_addition(&cols, n) {
        return Err(Witness::new(
            "step3",
            "gc",
            "lines of the normalised matrix are not closed under entrywise product",
        ));
    }
    let fourier = fourier_decompose(&norm.x, n, !cd.step1.bipartite)
        .map_err(|e| Witness::new("step3", "fourier", e))?;
    let mut classes = Vec::new();
    for (s, side) in y.iter().enumerate() {
        for (r, ys) in side.iter().enumerate() {
            if let Some(c) = analyse_class(s, r as u64, ys, &fourier, n)? {
                classes.push(c);
            }
        }
    }
    Ok(Structure { y, fourier, classes })
}
