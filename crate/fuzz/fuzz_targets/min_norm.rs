#![no_main]

use libfuzzer_sys::fuzz_target;
use tesgo::min_norm::{dist_to_polytope, min_norm_point, Polytope, DEFAULT_TOL};

// Layout: dim byte, vertex-count byte, then little-endian f64 coordinates
// (query point first). Non-finite or huge coordinates are skipped.
fuzz_target!(|data: &[u8]| {
    let [d, k, rest @ ..] = data else {
        return;
    };
    let dim = usize::from(*d % 6) + 1;
    let count = usize::from(*k % 12) + 1;
    let coords: Vec<f64> = rest
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .filter(|v| v.is_finite() && v.abs() <= 1e6)
        .collect();
    if coords.len() < dim * (count + 1) {
        return;
    }
    let q = coords[..dim].to_vec();
    let vertices: Vec<Vec<f64>> = coords[dim..dim * (count + 1)].chunks(dim).map(<[f64]>::to_vec).collect();
    let p = Polytope::new(vertices).unwrap();
    let r = min_norm_point(&p, DEFAULT_TOL);
    assert!(r.sq_norm >= 0.0);
    assert!(r.weights.iter().all(|w| *w >= 0.0));
    assert!((r.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    let proj = dist_to_polytope(&q, &p, DEFAULT_TOL).unwrap();
    assert!(proj.sq_dist >= 0.0);
});
