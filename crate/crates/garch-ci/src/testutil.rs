//! Numerical helpers shared by unit tests (quadrature oracles).

/// Composite Simpson rule on [a, b] with an odd number of nodes.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, nodes: usize) -> f64 {
    assert!(nodes >= 3 && nodes % 2 == 1);
    let h = (b - a) / (nodes - 1) as f64;
    let mut acc = f(a) + f(b);
    for i in 1..nodes - 1 {
        let x = a + h * i as f64;
        acc += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = simpson(|x| x * x * x + x, 0.0, 2.0, 101);
        assert!((v - 6.0).abs() < 1e-12);
    }
}
