//! Polynomial-time evaluation of `Z_A(G)` from a tractability certificate.
//!
//! For a connected graph and a structured component of `A`, the partition
//! function factors as a rank-one part (magnitudes and the `K` tables), a root of
//! unity collected during normalisation, and `Z_{X,Y'}(G)`. The last factor splits
//! over the primes of the Fourier decomposition; each prime contributes one
//! quadratic exponential sum over the uniform-map variables of all vertices.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::arith::{lcm, mod_inv};
use crate::cyclotomic::{CycNum, Rational};
use crate::dichotomy::{
    decide, validate_certificate, Certificate, ComponentBody, Fourier, PrimePart, StructuredComponent, Verdict,
    Witness,
};
use crate::formats::parse_entry;
use crate::gausssum::{eval_gauss_sum, QuadPoly};
use crate::model::{graph_components, MultiGraph, PureEntry, PureMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("matrix is #P-hard: {0}")]
    NotTractable(Witness),
}

enum ComponentPlan {
    Single(PureEntry),
    Structured {
        sc: Box<StructuredComponent>,
        /// Vertex polynomial per `(side, r', prime)`.
        polys: HashMap<(usize, u64, u64), QuadPoly>,
    },
}

/// A validated certificate with its vertex polynomials precomputed.
pub struct EvalPlan {
    conductor: u64,
    comps: Vec<ComponentPlan>,
}

fn rational_pow(r: &Rational, e: u64) -> Rational {
    let e = u32::try_from(e).expect("degree fits in u32");
    Rational::new(r.numer().pow(e), r.denom().pow(e))
}

/// `ω_{π̂}^β = ω_{n'}^α`, when `ω_{n'}^α` is a `π̂`-th root of unity.
fn convert_exponent(alpha: u64, n_prime: u64, pi_hat: u64) -> Option<u64> {
    let l = lcm(n_prime, pi_hat);
    let t = alpha * (l / n_prime);
    (t % (l / pi_hat) == 0).then(|| t / (l / pi_hat) % pi_hat)
}

fn class_values(sc: &StructuredComponent, side: usize, r: u64) -> HashMap<&[u64], u64> {
    let st = &sc.structure;
    st.fourier.coords[side]
        .iter()
        .zip(&st.y[side][r as usize])
        .filter_map(|(c, y)| y.map(|y| (c.as_slice(), y)))
        .collect()
}

fn all_points(q: u64, s: usize, limit: u64) -> Option<Vec<Vec<u64>>> {
    let total = (q as u128).checked_pow(s as u32)?;
    if total > limit as u128 {
        return None;
    }
    let mut out = vec![Vec::new()];
    for _ in 0..s {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..q).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    Some(out)
}

/// Quadratic `f` over `Z_{π̂}` with `ω_{π̂}^{f(x)} = Y'^{[r']}` at the point
/// `τ(x)` of the prime part (other primes held at the pivot).
pub fn build_vertex_poly(
    sc: &StructuredComponent,
    side: usize,
    r: u64,
    part: &PrimePart,
) -> Result<QuadPoly, String> {
    let f = &sc.structure.fourier;
    let np = sc.n_prime;
    let moduli = f.moduli();
    let pi_hat = part.pi_hat;
    let map = &part.map;
    let coords = &part.coords;
    let h = coords.len();
    let s = map.num_vars();
    let pim: Vec<u64> = coords.iter().map(|&i| moduli[i]).collect();
    let c = |j: usize, k: usize| f.coefficient(coords[j], coords[k]).0;
    // w[i][j]: coefficient of (π̂/π_j) z_j in the shift relation of generator i
    let mut w = vec![vec![0u64; h]; s];
    let mut beta = vec![0u64; s];
    for (i, sh) in part.shifts.iter().enumerate() {
        for j in 0..h {
            let mut acc = 0u64;
            for k in 0..h {
                let cjk = if side == 0 { c(j, k) } else { c(k, j) };
                acc = (acc + cjk * sh.b[k]) % pim[j];
            }
            w[i][j] = acc;
        }
        beta[i] = convert_exponent(sh.alpha, np, pi_hat)
            .ok_or_else(|| format!("shift constant {} is not a power of the {pi_hat}-th root", sh.alpha))?;
    }
    let lin_form = |i: usize, z: &[u64]| -> u64 {
        (0..h).fold(0, |acc, j| (acc + w[i][j] * (pi_hat / pim[j]) % pi_hat * (z[j] % pim[j])) % pi_hat)
    };
    let cm: Vec<Vec<u64>> = (0..s)
        .map(|i| (0..s).map(|l| lin_form(i, &map.matrix[l])).collect())
        .collect();
    for i in 0..s {
        for l in 0..i {
            if cm[i][l] != cm[l][i] {
                return Err(format!("shift relations are not symmetric at ({i}, {l})"));
            }
        }
    }
    let mut poly = QuadPoly::new(pi_hat, s).map_err(|e| e.to_string())?;
    for i in 0..s {
        let cii = cm[i][i];
        let aii = if part.prime == 2 {
            if cii % 2 != 0 {
                return Err("odd diagonal coefficient for the prime 2".into());
            }
            cii / 2
        } else {
            cii * mod_inv(2, pi_hat).expect("odd modulus") % pi_hat
        };
        poly.add_quad(i, i, aii);
        for l in i + 1..s {
            poly.add_quad(i, l, cm[i][l]);
        }
        let ci0 = (beta[i] + lin_form(i, &map.offset)) % pi_hat;
        poly.add_lin(i, ci0 + pi_hat - aii);
    }
    // pointwise confirmation against the stored values
    let values = class_values(sc, side, r);
    let cd = sc.structure.class(side, r).ok_or("no class data")?;
    let l = lcm(np, pi_hat);
    let points = all_points(pi_hat, s, 1 << 12).unwrap_or_else(|| {
        let mut pts = vec![vec![0; s]];
        for i in 0..s {
            for j in i..s {
                let mut p = vec![0; s];
                p[i] += 1;
                p[j] += 1;
                pts.push(p);
            }
        }
        pts
    });
    for x in points {
        let z = map.apply(&x);
        let mut full = cd.pivot.clone();
        for (&i, &zi) in coords.iter().zip(&z) {
            full[i] = zi;
        }
        let y = values
            .get(full.as_slice())
            .ok_or_else(|| format!("uniform map leaves the support at {x:?}"))?;
        if poly.eval(&x) * (l / pi_hat) % l != y * (l / np) % l {
            return Err(format!("vertex polynomial disagrees with Y' at {x:?}"));
        }
    }
    Ok(poly)
}

/// Add the contribution of `mult` parallel edges between a row-side vertex
/// (variables from `off_u`) and a column-side vertex (from `off_v`).
pub fn build_edge_poly(
    poly: &mut QuadPoly,
    f: &Fourier,
    coords: &[usize],
    u: (&PrimePart, usize),
    v: (&PrimePart, usize),
    mult: u64,
) {
    let pi_hat = poly.modulus();
    let (pu, off_u) = u;
    let (pv, off_v) = v;
    let (mu, mv) = (&pu.map, &pv.map);
    let m = mult % pi_hat;
    for (j, &cj) in coords.iter().enumerate() {
        for (k, &ck) in coords.iter().enumerate() {
            let (c, pij) = f.coefficient(cj, ck);
            if c == 0 {
                continue;
            }
            let wt = c * (pi_hat / pij) % pi_hat * m % pi_hat;
            let (ou, ov) = (mu.offset[j], mv.offset[k]);
            poly.add_const(wt * ou % pi_hat * ov);
            for (l, row) in mu.matrix.iter().enumerate() {
                poly.add_lin(off_u + l, wt * row[j] % pi_hat * ov);
            }
            for (l, row) in mv.matrix.iter().enumerate() {
                poly.add_lin(off_v + l, wt * ou % pi_hat * row[k]);
            }
            for (l, ru) in mu.matrix.iter().enumerate() {
                for (l2, rv) in mv.matrix.iter().enumerate() {
                    poly.add_quad(off_u + l, off_v + l2, wt * ru[j] % pi_hat * rv[k]);
                }
            }
        }
    }
}

/// `Π_v Σ_i g_i^{deg v} K^{[deg v mod N]}_i` over the magnitude groups of each side.
pub fn rank1_closed_form(sc: &StructuredComponent, side_of: &[usize], degrees: &[u64]) -> CycNum {
    let n = sc.n;
    let mut acc = CycNum::one(n);
    for (&s, &d) in side_of.iter().zip(degrees) {
        let side = &sc.sides[s];
        let k = &side.k[(d % n) as usize];
        let mut sum = CycNum::zero(n);
        for (g, kv) in side.group_values.iter().zip(k) {
            sum = &sum + &kv.scale(&rational_pow(g, d));
        }
        acc = &acc * &sum;
        if acc.is_zero() {
            break;
        }
    }
    acc
}

impl EvalPlan {
    /// Validate `cert` against `a` and precompute the vertex polynomials.
    pub fn new(a: &PureMatrix, cert: &Certificate) -> Result<Self, EvalError> {
        validate_certificate(a, cert).map_err(|e| EvalError::InvalidCertificate(e.0))?;
        let mut comps = Vec::new();
        for cc in &cert.components {
            comps.push(match &cc.body {
                ComponentBody::Single { entry } => ComponentPlan::Single(
                    parse_entry(entry, 0).map_err(|e| EvalError::InvalidCertificate(e.to_string()))?,
                ),
                ComponentBody::Structured(sc) => {
                    let mut polys = HashMap::new();
                    for cd in &sc.structure.classes {
                        for part in &cd.primes {
                            let f = build_vertex_poly(sc, cd.side, cd.r, part)
                                .map_err(EvalError::InvalidCertificate)?;
                            polys.insert((cd.side, cd.r, part.prime), f);
                        }
                    }
                    ComponentPlan::Structured { sc: sc.clone(), polys }
                }
            });
        }
        Ok(EvalPlan {
            conductor: a.working_conductor(),
            comps,
        })
    }

    /// Decide `a` and build a plan, failing for #P-hard matrices.
    pub fn from_matrix(a: &PureMatrix) -> Result<Self, EvalError> {
        match decide(a) {
            Verdict::Tractable(cert) => Self::new(a, &cert),
            Verdict::PHard(w) => Err(EvalError::NotTractable(w)),
        }
    }

    /// `Z_A(G)`, with conductor `A.working_conductor()`.
    pub fn eval(&self, g: &MultiGraph) -> CycNum {
        let l = self.conductor;
        let mut total = CycNum::one(l);
        for gc in graph_components(g) {
            let mut sum = CycNum::zero(l);
            for comp in &self.comps {
                sum = &sum + &eval_connected(comp, &gc.graph, l);
            }
            total = &total * &sum;
            if total.is_zero() {
                break;
            }
        }
        // the value lies in Q(ω_L); fall back to the wider field only if it does not
        total.restrict(l).unwrap_or(total)
    }
}

fn eval_connected(comp: &ComponentPlan, g: &MultiGraph, l: u64) -> CycNum {
    match comp {
        ComponentPlan::Single(e) => {
            if g.edges().is_empty() {
                CycNum::one(l)
            } else {
                e.to_cycnum(l).pow(g.total_multiplicity())
            }
        }
        ComponentPlan::Structured { sc, polys } => {
            let nv = g.vertex_count();
            if !sc.bipartite {
                return eval_oriented(sc, polys, g, &vec![0; nv]);
            }
            let Some(colour) = g.two_colouring() else {
                return CycNum::zero(1);
            };
            let mut sum = CycNum::zero(1);
            for flip in 0..2u8 {
                let side_of: Vec<usize> = colour.iter().map(|&c| (c ^ flip) as usize).collect();
                sum = &sum + &eval_oriented(sc, polys, g, &side_of);
            }
            sum
        }
    }
}

fn eval_oriented(
    sc: &StructuredComponent,
    polys: &HashMap<(usize, u64, u64), QuadPoly>,
    g: &MultiGraph,
    side_of: &[usize],
) -> CycNum {
    let n = sc.n;
    let degrees = g.degrees();
    let edges = g.total_multiplicity();
    let mut root = sc.h11 * (edges % n) % n;
    for (&s, &d) in side_of.iter().zip(&degrees) {
        match sc.sides[s].vertex_exp[(d % n) as usize] {
            Some(e) => root = (root + e) % n,
            None => return CycNum::zero(1),
        }
    }
    let rank1 = rank1_closed_form(sc, side_of, &degrees);
    if rank1.is_zero() {
        return CycNum::zero(1);
    }
    let zxy = assemble_and_sum(sc, polys, g, side_of, &degrees);
    let scale = rational_pow(&sc.scale, edges);
    (&(&rank1 * &CycNum::root(n, root)) * &zxy).scale(&scale)
}

/// `Z_{X,Y'}(G)` for one orientation, as a product of per-prime Gauss sums.
pub fn assemble_and_sum(
    sc: &StructuredComponent,
    polys: &HashMap<(usize, u64, u64), QuadPoly>,
    g: &MultiGraph,
    side_of: &[usize],
    degrees: &[u64],
) -> CycNum {
    let np = sc.n_prime;
    let st = &sc.structure;
    let mut classes = Vec::with_capacity(degrees.len());
    for (&s, &d) in side_of.iter().zip(degrees) {
        match st.class(s, d % np) {
            Some(c) => classes.push(c),
            None => return CycNum::zero(1),
        }
    }
    if st.fourier.blocks.is_empty() {
        // a single class: every vertex contributes its Y' value at the pivot
        let e = side_of
            .iter()
            .zip(degrees)
            .map(|(&s, &d)| st.y[s][(d % np) as usize][0].expect("class data implies support"))
            .sum::<u64>();
        return CycNum::root(np, e % np);
    }
    let mut result = CycNum::one(1);
    let primes: Vec<u64> = classes[0].primes.iter().map(|p| p.prime).collect();
    for (pi, &p) in primes.iter().enumerate() {
        let parts: Vec<&PrimePart> = classes.iter().map(|c| &c.primes[pi]).collect();
        let mut offsets = Vec::with_capacity(parts.len());
        let mut total_vars = 0;
        for part in &parts {
            offsets.push(total_vars);
            total_vars += part.map.num_vars();
        }
        let pi_hat = parts[0].pi_hat;
        let mut poly = QuadPoly::new(pi_hat, total_vars).expect("prime power modulus");
        let mut mult = BigInt::one();
        for (v, part) in parts.iter().enumerate() {
            let f = &polys[&(side_of[v], degrees[v] % np, p)];
            for ((i, j), c) in f.quad_terms() {
                poly.add_quad(offsets[v] + i, offsets[v] + j, c);
            }
            for (i, c) in f.lin_terms() {
                poly.add_lin(offsets[v] + i, c);
            }
            poly.add_const(f.constant());
            mult *= &part.map.multiplicity;
        }
        for e in g.edges() {
            let (a, b) = if side_of[e.u] == 0 { (e.u, e.v) } else { (e.v, e.u) };
            build_edge_poly(
                &mut poly,
                &st.fourier,
                &parts[a].coords,
                (parts[a], offsets[a]),
                (parts[b], offsets[b]),
                e.mult,
            );
        }
        let z = eval_gauss_sum(&poly).scale(&Rational::new(BigInt::one(), mult));
        result = &result * &z;
        if result.is_zero() {
            break;
        }
    }
    result
}

/// Decide `a`, then evaluate `Z_A(G)` from the resulting certificate.
pub fn eval(a: &PureMatrix, g: &MultiGraph) -> Result<CycNum, EvalError> {
    Ok(EvalPlan::from_matrix(a)?.eval(g))
}

/// Evaluate with a given certificate, which is validated first.
pub fn eval_with_certificate(a: &PureMatrix, cert: &Certificate, g: &MultiGraph) -> Result<CycNum, EvalError> {
    Ok(EvalPlan::new(a, cert)?.eval(g))
}
