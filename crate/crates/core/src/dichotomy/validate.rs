//! Replay of a certificate against its matrix, using only the stored data.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use thiserror::Error;

use super::certificate::{Certificate, ComponentBody, StructuredComponent};
use super::steps::root_sum;
use super::structure::{cross_pairing, pi_hat};
use crate::arith::{gcd, prime_power};
use crate::cyclotomic::CycNum;
use crate::formats::format_entry;
use crate::lattice::Coset;
use crate::model::{components, PureMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid certificate: {0}")]
pub struct CertificateError(pub String);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CertificateError> {
    if cond {
        Ok(())
    } else {
        Err(CertificateError(msg()))
    }
}

/// Check every stored equality of `cert` against `a`.
pub fn validate_certificate(a: &PureMatrix, cert: &Certificate) -> Result<(), CertificateError> {
    ensure(cert.dim == a.dim(), || "dimension mismatch".into())?;
    let comps = components(a);
    ensure(comps.len() == cert.components.len(), || "component count mismatch".into())?;
    for (ci, (comp, cc)) in comps.iter().zip(&cert.components).enumerate() {
        ensure(comp.indices == cc.indices, || format!("component {ci}: index set mismatch"))?;
        match &cc.body {
            ComponentBody::Single { entry } => {
                ensure(comp.indices.len() == 1, || format!("component {ci}: not a single index"))?;
                ensure(*entry == format_entry(comp.matrix.get(0, 0)), || {
                    format!("component {ci}: entry mismatch")
                })?;
            }
            ComponentBody::Structured(sc) => {
                check_structured(&comp.matrix, sc).map_err(|e| CertificateError(format!("component {ci}: {}", e.0)))?
            }
        }
    }
    Ok(())
}

fn check_structured(a: &PureMatrix, sc: &StructuredComponent) -> Result<(), CertificateError> {
    let m = a.dim();
    let n = sc.n;
    let np = sc.n_prime;
    let h = sc.h;
    ensure(n > 0 && np == if n % 2 == 0 { n } else { 2 * n }, || "bad conductors".into())?;
    ensure(n % a.working_conductor() == 0, || "root order does not divide N".into())?;
    ensure(sc.sides.len() == if sc.bipartite { 2 } else { 1 }, || "wrong number of sides".into())?;
    let mut seen = vec![false; m];
    for side in &sc.sides {
        let len = side.members.len();
        ensure(
            side.values.len() == len
                && side.group_of.len() == len
                && side.class_of.len() == len
                && side.shift.len() == len,
            || "side tables have inconsistent lengths".into(),
        )?;
        for &x in &side.members {
            ensure(x < m && !seen[x], || format!("index {x} repeated or out of range"))?;
            seen[x] = true;
        }
        for i in 0..len {
            ensure(
                side.group_of[i] < side.group_values.len() && side.group_values[side.group_of[i]] == side.values[i],
                || format!("member {i} has the wrong group"),
            )?;
            ensure(side.class_of[i] < h && side.shift[i] < n, || "class out of range".into())?;
        }
        ensure(side.group_values.windows(2).all(|w| w[0] > w[1]), || "groups not descending".into())?;
        ensure(side.group_of.windows(2).all(|w| w[0] <= w[1]), || "members not sorted".into())?;
        ensure(side.reps.len() == h, || "wrong number of classes".into())?;
        for (c, &r) in side.reps.iter().enumerate() {
            ensure(
                r < len && side.class_of[r] == c && side.shift[r] == 0 && side.group_of[r] == 0,
                || format!("representative of class {c} is invalid"),
            )?;
        }
    }
    ensure(seen.iter().all(|&s| s), || "sides do not cover the component".into())?;
    ensure(sc.hmat.len() == h && sc.hmat.iter().all(|r| r.len() == h && r.iter().all(|&e| e < n)), || {
        "bad class matrix".into()
    })?;

    // entries of A from the stored factorisation
    let rows = &sc.sides[0];
    let cols = &sc.sides[sc.sides.len() - 1];
    if sc.bipartite {
        for side in &sc.sides {
            for &x in &side.members {
                for &y in &side.members {
                    ensure(a.get(x, y).is_zero(), || format!("entry ({x}, {y}) should be zero"))?;
                }
            }
        }
    }
    for (i, &x) in rows.members.iter().enumerate() {
        for (j, &y) in cols.members.iter().enumerate() {
            let e = a.get(x, y);
            let mag = &sc.scale * &rows.values[i] * &cols.values[j];
            ensure(!e.is_zero() && *e.magnitude() == mag, || format!("magnitude mismatch at ({x}, {y})"))?;
            let want = (rows.shift[i] + cols.shift[j] + sc.hmat[rows.class_of[i]][cols.class_of[j]]) % n;
            ensure(e.exponent_in(n) == want, || format!("root mismatch at ({x}, {y})"))?;
        }
    }

    // unitarity of H
    for i in 0..h {
        for j in i + 1..h {
            let r = root_sum(n, (0..h).map(|k| sc.hmat[i][k] + n - sc.hmat[j][k]));
            let c = root_sum(n, (0..h).map(|k| sc.hmat[k][i] + n - sc.hmat[k][j]));
            ensure(r.is_zero() && c.is_zero(), || format!("class matrix not orthogonal at ({i}, {j})"))?;
        }
    }

    // D = K ⊗ L and the normalisation
    ensure(sc.h11 == sc.hmat[0][0], || "wrong H_11".into())?;
    for (s, side) in sc.sides.iter().enumerate() {
        let groups = side.group_values.len();
        ensure(side.k.len() == n as usize && side.l.len() == n as usize && side.pivots.len() == n as usize, || {
            "per-residue tables have the wrong length".into()
        })?;
        let alpha: Vec<u64> = (0..h)
            .map(|j| {
                let e = if s == 0 { sc.hmat[j][0] } else { sc.hmat[0][j] };
                (e + n - sc.h11) % n
            })
            .collect();
        ensure(side.alpha == alpha, || format!("side {s}: wrong normalising factors"))?;
        for r in 0..n as usize {
            let (k, l) = (&side.k[r], &side.l[r]);
            ensure(k.len() == groups && l.len() == h, || "factor tables have the wrong length".into())?;
            for g in 0..groups {
                for c in 0..h {
                    let d = root_sum(
                        n,
                        (0..side.members.len())
                            .filter(|&x| side.group_of[x] == g && side.class_of[x] == c)
                            .map(|x| side.shift[x] * r as u64 % n),
                    );
                    ensure(d == &k[g] * &l[c], || format!("side {s}: D^[{r}] != K L at ({g}, {c})"))?;
                }
            }
            match side.pivots[r] {
                None => {
                    ensure(l.iter().all(|z| z.is_zero()), || "L must vanish without a pivot".into())?;
                    ensure(side.vertex_exp[r].is_none(), || "vertex factor without pivot".into())?;
                }
                Some(b) => {
                    ensure(b < h && l[b].is_one(), || format!("side {s}: L^[{r}] pivot is not 1"))?;
                    let one = CycNum::one(n);
                    ensure(l.iter().all(|z| z.is_zero() || z.norm_sq() == one), || {
                        format!("side {s}: L^[{r}] has an entry of modulus other than 0, 1")
                    })?;
                    ensure(side.vertex_exp[r] == Some(r as u64 * alpha[b] % n), || {
                        format!("side {s}: wrong vertex factor for r = {r}")
                    })?;
                }
            }
        }
        let y = &sc.structure.y[s];
        ensure(y.len() == np as usize, || "Y' table has the wrong length".into())?;
        for (rp, ys) in y.iter().enumerate() {
            let r = rp % n as usize;
            for c in 0..h {
                let expected = match side.pivots[r] {
                    None => CycNum::zero(n),
                    Some(b) => &side.l[r][c] * &CycNum::root(n, r as u64 * (alpha[c] + n - alpha[b]) % n),
                };
                let stored = match ys[c] {
                    None => CycNum::zero(np),
                    Some(e) => CycNum::root(np, e),
                };
                ensure(stored == expected.embed(np).expect("N divides N'"), || {
                    format!("side {s}: Y'^[{rp}] mismatch at class {c}")
                })?;
            }
        }
    }
    let lift = np / n;
    let last = sc.sides.len() - 1;
    for i in 0..h {
        for j in 0..h {
            let want = (sc.hmat[i][j] + 3 * n - sc.sides[0].alpha[i] - sc.sides[last].alpha[j] - sc.h11) % n * lift;
            ensure(sc.x[i][j] == want, || format!("normalised matrix mismatch at ({i}, {j})"))?;
        }
    }
    check_fourier(sc)?;
    check_classes(sc)
}

fn check_fourier(sc: &StructuredComponent) -> Result<(), CertificateError> {
    let f = &sc.structure.fourier;
    let np = sc.n_prime;
    let h = sc.h;
    for b in &f.blocks {
        let pp = prime_power(b.modulus);
        ensure(pp.map(|p| p.0) == Some(b.prime) && np % b.modulus == 0, || "bad block modulus".into())?;
        ensure(
            (b.form.len() == 1 || b.form.len() == 2) && b.form.iter().all(|r| r.len() == b.form.len()),
            || "bad block form".into(),
        )?;
        ensure(gcd(b.form[0][0], b.modulus) == 1 || b.form.len() == 2, || "degenerate block".into())?;
    }
    ensure(f.coords.len() == sc.sides.len(), || "wrong number of coordinate maps".into())?;
    let moduli = f.moduli();
    let size: u64 = moduli.iter().product();
    ensure(size == h as u64, || "coordinate group has the wrong size".into())?;
    for side in &f.coords {
        ensure(side.len() == h, || "coordinate table has the wrong length".into())?;
        ensure(
            side.iter().all(|c| c.len() == moduli.len() && c.iter().zip(&moduli).all(|(x, m)| x < m)),
            || "coordinate out of range".into(),
        )?;
        ensure(side.iter().collect::<HashSet<_>>().len() == h, || "coordinates repeat".into())?;
    }
    let last = f.coords.len() - 1;
    for a in 0..h {
        for b in 0..h {
            ensure(f.pairing(&f.coords[0][a], &f.coords[last][b], np) == sc.x[a][b], || {
                format!("Fourier form disagrees at ({a}, {b})")
            })?;
        }
    }
    Ok(())
}

fn check_classes(sc: &StructuredComponent) -> Result<(), CertificateError> {
    let st = &sc.structure;
    let f = &st.fourier;
    let np = sc.n_prime;
    let moduli = f.moduli();
    for (s, per_r) in st.y.iter().enumerate() {
        for (r, ys) in per_r.iter().enumerate() {
            let value: HashMap<&[u64], u64> = f.coords[s]
                .iter()
                .zip(ys)
                .filter_map(|(c, y)| y.map(|y| (c.as_slice(), y)))
                .collect();
            let matching: Vec<_> = st.classes.iter().filter(|c| c.side == s && c.r == r as u64).collect();
            if value.is_empty() {
                ensure(matching.is_empty(), || format!("side {s}, r = {r}: class data for empty support"))?;
                continue;
            }
            ensure(matching.len() == 1, || format!("side {s}, r = {r}: missing class data"))?;
            let cd = matching[0];
            let mut support: Vec<Vec<u64>> = value.keys().map(|k| k.to_vec()).collect();
            support.sort();
            ensure(cd.support.moduli == moduli && cd.support.elements() == support, || {
                format!("side {s}, r = {r}: support is not the stored coset")
            })?;
            let first_one = support.iter().find(|x| value[x.as_slice()] == 0);
            ensure(first_one == Some(&cd.pivot), || format!("side {s}, r = {r}: wrong pivot"))?;
            let mut covered: Vec<usize> = cd.primes.iter().flat_map(|p| p.coords.clone()).collect();
            covered.sort_unstable();
            ensure(covered == (0..moduli.len()).collect::<Vec<_>>(), || "prime coordinates do not partition".into())?;
            for x in &support {
                let mut total = 0;
                for part in &cd.primes {
                    let mut e = cd.pivot.clone();
                    for &i in &part.coords {
                        e[i] = x[i];
                    }
                    let v = value.get(e.as_slice()).ok_or_else(|| CertificateError("support is not a product over primes".into()))?;
                    total = (total + v) % np;
                }
                ensure(total == value[x.as_slice()], || format!("side {s}, r = {r}: values do not factor at {x:?}"))?;
            }
            for part in &cd.primes {
                let pmod: Vec<u64> = part.coords.iter().map(|&i| moduli[i]).collect();
                ensure(
                    pmod.iter().all(|&q| prime_power(q).map(|p| p.0) == Some(part.prime)),
                    || "coordinate assigned to the wrong prime".into(),
                )?;
                ensure(part.pi_hat == pi_hat(part.prime, &pmod), || "wrong modulus for the prime".into())?;
                let map = &part.map;
                let pivot_p: Vec<u64> = part.coords.iter().map(|&i| cd.pivot[i]).collect();
                ensure(map.moduli == pmod && map.offset == pivot_p && map.pi_hat == part.pi_hat, || {
                    "uniform map has the wrong frame".into()
                })?;
                let mut projected: Vec<Vec<u64>> = support
                    .iter()
                    .map(|x| part.coords.iter().map(|&i| x[i]).collect())
                    .collect();
                projected.sort();
                projected.dedup();
                let generated = Coset {
                    moduli: pmod.clone(),
                    rep: pivot_p.clone(),
                    gens: map.matrix.clone(),
                    size: projected.len() as u64,
                };
                ensure(generated.elements() == projected, || "uniform map does not cover the coset".into())?;
                let size = BigInt::from(projected.len());
                ensure(
                    BigInt::from(part.pi_hat).pow(map.matrix.len() as u32) == &map.multiplicity * &size,
                    || "wrong multiplicity".into(),
                )?;
                for (g, o) in map.matrix.iter().zip(&map.orders) {
                    ensure(part.pi_hat % o == 0, || "generator order does not divide the modulus".into())?;
                    ensure(g.iter().zip(&pmod).all(|(x, m)| (x * o) % m == 0), || "generator order too small".into())?;
                }
                ensure(part.shifts.len() == map.matrix.len(), || "missing shift data".into())?;
                for (g, sh) in map.matrix.iter().zip(&part.shifts) {
                    ensure(sh.b.len() == pmod.len() && sh.alpha < np, || "bad shift data".into())?;
                    let mut bt = vec![0u64; moduli.len()];
                    let mut gt = vec![0u64; moduli.len()];
                    for (k, &i) in part.coords.iter().enumerate() {
                        bt[i] = sh.b[k];
                        gt[i] = g[k];
                    }
                    for x in &support {
                        let moved: Vec<u64> = x.iter().zip(&gt).zip(&moduli).map(|((a, b), m)| (a + b) % m).collect();
                        let t = (value[moved.as_slice()] + np - value[x.as_slice()]) % np;
                        let fx = cross_pairing(f, s, x, &bt, np);
                        ensure((fx + sh.alpha) % np == t, || format!("side {s}, r = {r}: shift relation fails at {x:?}"))?;
                    }
                }
            }
        }
    }
    for c in &st.classes {
        ensure(c.side < st.y.len() && (c.r as usize) < st.y[c.side].len(), || "class data out of range".into())?;
    }
    Ok(())
}
