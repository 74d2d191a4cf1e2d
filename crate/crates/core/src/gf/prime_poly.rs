//! Dense polynomials over the prime field GF(p), coefficient lists with the
//! constant term first. Used for modulus validation and element inversion.

pub(crate) type Coeffs = Vec<u32>;

#[inline]
pub(crate) fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    let s = a as u64 + b as u64;
    (if s >= p as u64 { s - p as u64 } else { s }) as u32
}

#[inline]
pub(crate) fn sub_mod(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        (a as u64 + p as u64 - b as u64) as u32
    }
}

#[inline]
pub(crate) fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    // Extended Euclid on integers.
    let (mut r0, mut r1) = (p as i64, (a % p) as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(p as i64) as u32
}

pub(crate) fn trim(a: &mut Coeffs) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub(crate) fn degree(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

/// Remainder of `a` modulo `f` (f need not be monic).
pub(crate) fn rem(a: &[u32], f: &[u32], p: u32) -> Coeffs {
    let df = degree(f).expect("division by zero polynomial");
    let mut r: Coeffs = a.to_vec();
    trim(&mut r);
    let lead_inv = inv_mod(f[df], p);
    while let Some(dr) = degree(&r) {
        if dr < df {
            break;
        }
        let c = mul_mod(r[dr], lead_inv, p);
        let shift = dr - df;
        for (i, &fi) in f[..=df].iter().enumerate() {
            if fi != 0 {
                r[shift + i] = sub_mod(r[shift + i], mul_mod(c, fi, p), p);
            }
        }
        trim(&mut r);
    }
    r
}

pub(crate) fn mul(a: &[u32], b: &[u32], p: u32) -> Coeffs {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if bj != 0 {
                out[i + j] = add_mod(out[i + j], mul_mod(ai, bj, p), p);
            }
        }
    }
    trim(&mut out);
    out
}

pub(crate) fn sub(a: &[u32], b: &[u32], p: u32) -> Coeffs {
    let mut out = vec![0u32; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = sub_mod(x, y, p);
    }
    trim(&mut out);
    out
}

pub(crate) fn gcd(a: &[u32], b: &[u32], p: u32) -> Coeffs {
    let mut x: Coeffs = a.to_vec();
    let mut y: Coeffs = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Inverse of `a` modulo the irreducible `f`, via the extended Euclidean
/// algorithm in GF(p)[x]. Returns `None` when `a` is zero modulo `f`.
pub(crate) fn inv_mod_poly(a: &[u32], f: &[u32], p: u32) -> Option<Coeffs> {
    let mut r0: Coeffs = f.to_vec();
    let mut r1: Coeffs = rem(a, f, p);
    if r1.is_empty() {
        return None;
    }
    let mut t0: Coeffs = Vec::new();
    let mut t1: Coeffs = vec![1];
    while !r1.is_empty() {
        // polynomial long division r0 = q r1 + r
        let d1 = degree(&r1).unwrap();
        let lead_inv = inv_mod(r1[d1], p);
        let mut q: Coeffs = Vec::new();
        let mut r = r0.clone();
        trim(&mut r);
        while let Some(dr) = degree(&r) {
            if dr < d1 {
                break;
            }
            let c = mul_mod(r[dr], lead_inv, p);
            let shift = dr - d1;
            if q.len() <= shift {
                q.resize(shift + 1, 0);
            }
            q[shift] = c;
            for (i, &v) in r1[..=d1].iter().enumerate() {
                if v != 0 {
                    r[shift + i] = sub_mod(r[shift + i], mul_mod(c, v, p), p);
                }
            }
            trim(&mut r);
        }
        let t2 = sub(&t0, &mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        t0 = std::mem::replace(&mut t1, t2);
    }
    // r0 is a nonzero constant gcd
    let c = inv_mod(r0[0], p);
    let mut out: Coeffs = t0.iter().map(|&t| mul_mod(t, c, p)).collect();
    trim(&mut out);
    Some(out)
}

/// `base^exp mod f` for a machine-word exponent.
fn pow_mod_poly(base: &[u32], mut exp: u64, f: &[u32], p: u32) -> Coeffs {
    let mut acc: Coeffs = vec![1];
    let mut b = rem(base, f, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = rem(&mul(&acc, &b, p), f, p);
        }
        exp >>= 1;
        if exp > 0 {
            b = rem(&mul(&b, &b, p), f, p);
        }
    }
    acc
}

fn prime_divisors(mut m: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn irreducible_by_trial_division(f: &[u32], p: u32) -> bool {
    let m = degree(f).unwrap();
    for d in 1..=m / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut g: Coeffs = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                g.push((x % p as u64) as u32);
                x /= p as u64;
            }
            g.push(1);
            if rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Rabin's test: `f` of degree m is irreducible iff `x^(p^m) = x mod f` and
/// `gcd(x^(p^(m/r)) - x, f) = 1` for every prime `r | m`.
fn irreducible_by_rabin(f: &[u32], p: u32) -> bool {
    let m = degree(f).unwrap();
    let divisors = prime_divisors(m);
    let x: Coeffs = vec![0, 1];
    let mut powers = vec![rem(&x, f, p)]; // powers[i] = x^(p^i) mod f
    for _ in 0..m {
        let prev = powers.last().unwrap();
        powers.push(pow_mod_poly(prev, p as u64, f, p));
    }
    if sub(&powers[m], &rem(&x, f, p), p) != Vec::<u32>::new() {
        return false;
    }
    for r in divisors {
        let h = sub(&powers[m / r], &x, p);
        let g = gcd(&h, f, p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// Trial division when the search space is small, Rabin's test otherwise.
pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let Some(m) = degree(f) else { return false };
    if m == 0 {
        return false;
    }
    if m == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let half = (m / 2) as u32;
    let trial_cost = (p as f64).powi(half as i32) * half as f64;
    if trial_cost <= 4096.0 {
        irreducible_by_trial_division(f, p)
    } else {
        irreducible_by_rabin(f, p)
    }
}

/// Cheap filter: does `f` have a factor of degree at most `max_deg`?
fn has_small_factor(f: &[u32], p: u32, max_deg: usize) -> bool {
    let m = degree(f).unwrap();
    let x: Coeffs = vec![0, 1];
    let mut xp = rem(&x, f, p);
    for d in 1..=max_deg.min(m / 2) {
        xp = pow_mod_poly(&xp, p as u64, f, p);
        let g = gcd(&sub(&xp, &x, p), f, p);
        if degree(&g).is_some_and(|dg| dg > 0) {
            return true;
        }
        let _ = d;
    }
    false
}

/// Lowest monic irreducible of degree `m`, ordered by the integer value of
/// the non-leading coefficients read base-p with the constant term least
/// significant.
pub(crate) fn lowest_irreducible(p: u32, m: usize) -> Coeffs {
    let mut candidate: Coeffs = vec![0; m + 1];
    candidate[m] = 1;
    if m == 1 {
        return candidate;
    }
    loop {
        // next candidate in value order
        let mut i = 0;
        loop {
            candidate[i] += 1;
            if candidate[i] == p {
                candidate[i] = 0;
                i += 1;
                assert!(i < m, "exhausted monic polynomials without finding an irreducible");
            } else {
                break;
            }
        }
        if candidate[0] == 0 {
            continue;
        }
        if p == 2 && candidate.iter().filter(|&&c| c == 1).count() % 2 == 0 {
            continue; // x + 1 divides it
        }
        if m > 16 && has_small_factor(&candidate, p, 6) {
            continue;
        }
        if is_irreducible(&candidate, p) {
            return candidate;
        }
    }
}
