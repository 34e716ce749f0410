use fuzzysphere::coherent::{minimize_dispersion, top_eigenvector_deficit, MinimizeOptions};
use fuzzysphere::{build_circle, build_sphere};

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let num: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    num / den
}

fn log_points(values: &[(u32, f64)], from: u32) -> Vec<(f64, f64)> {
    values
        .iter()
        .filter(|(l, _)| *l >= from)
        .map(|&(l, v)| ((l as f64 + 1.0).ln(), v.ln()))
        .collect()
}

#[test]
fn sphere_minimum_decreases_like_inverse_square() {
    let opts = MinimizeOptions::default();
    let mut minima = Vec::new();
    let mut deficits = Vec::new();
    for lambda in 1..=20 {
        let s = build_sphere(lambda, None).unwrap();
        let min = minimize_dispersion(&s, &opts);
        assert!(min.converged, "Lambda = {lambda}");
        minima.push((lambda, min.value));
        deficits.push(top_eigenvector_deficit(&s, &min.state).unwrap());
    }
    for w in minima.windows(2) {
        assert!(w[1].1 < w[0].1, "{w:?}");
    }
    let k = slope(&log_points(&minima, 10));
    assert!((-2.3..=-1.7).contains(&k), "slope {k}");
    // the minimizer approaches the top x_3 eigenvector
    assert!(deficits.iter().all(|&d| d >= 0.0), "{deficits:?}");
    for w in deficits.windows(2) {
        assert!(w[1] < w[0], "{deficits:?}");
    }
}

#[test]
fn circle_minimum_decreases_like_inverse_square() {
    let opts = MinimizeOptions::default();
    let minima: Vec<(u32, f64)> = (1..=20)
        .map(|lambda| {
            (
                lambda,
                minimize_dispersion(&build_circle(lambda, None).unwrap(), &opts).value,
            )
        })
        .collect();
    for w in minima.windows(2) {
        assert!(w[1].1 < w[0].1, "{w:?}");
    }
    let k = slope(&log_points(&minima, 10));
    assert!((-2.3..=-1.7).contains(&k), "slope {k}");
}
