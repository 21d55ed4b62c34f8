/// Smallest prime divisor of `n` (trial division). Returns `None` for `n < 2`.
pub fn smallest_prime_factor(n: u32) -> Option<u32> {
    if n < 2 {
        return None;
    }
    let mut p = 2u32;
    while (p as u64) * (p as u64) <= n as u64 {
        if n.is_multiple_of(p) {
            return Some(p);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    Some(n)
}

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
pub fn factorize(mut n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    while let Some(p) = smallest_prime_factor(n) {
        let mut k = 0;
        while n.is_multiple_of(p) {
            n /= p;
            k += 1;
        }
        out.push((p, k));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors() {
        assert_eq!(smallest_prime_factor(1), None);
        assert_eq!(smallest_prime_factor(2), Some(2));
        assert_eq!(smallest_prime_factor(35), Some(5));
        assert_eq!(smallest_prime_factor(1013), Some(1013));
        assert_eq!(factorize(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(9), vec![(3, 2)]);
        assert!(factorize(1).is_empty());
    }
}
