//! Independent oracles for phantoms, projectors, filters and metrics.

use std::f64::consts::PI;

use adapted_filters::filterbank::{
    apply_filter, compute_adapted_filter, compute_reference_filter, expbin_basis, padded_len, projection_residual,
    projection_system, read_filter, standard_filter, write_filter, BasisDescriptor, FilterSpec,
};
use adapted_filters::metrics::{
    f1_jaccard, histogram_range, mean_std, otsu_threshold, pixelwise_std, rmse, segment, squared_bias,
    std_histogram, ReconSet, OTSU_BINS,
};
use adapted_filters::phantoms::{
    add_poisson_noise, add_zingers, analytic_sinogram, generate_foam, rasterize_slice, single_pixel_phantom,
    slice_phantom, Circle, FoamSpec, Slice2D,
};
use adapted_filters::reconstructors::{backproject, sirt, sirt_monitored};
use adapted_filters::{
    fbp, forward_project, Error, Geometry, ImageGrid, Implementation, KernelKind, Reconstructor, Sinogram,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_image(n: usize, seed: u64) -> ImageGrid {
    let mut r = rng(seed);
    ImageGrid::from_values(n, (0..n * n).map(|_| r.random::<f64>()).collect()).unwrap()
}

fn random_sinogram(g: &Geometry, seed: u64) -> Sinogram {
    let mut r = rng(seed);
    Sinogram::from_values(g.clone(), (0..g.n_proj()).map(|_| r.random::<f64>() - 0.5).collect()).unwrap()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    diff_norm(a, b) / norm(b).max(f64::MIN_POSITIVE)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn small_foam_slice(n_spheres: usize, seed: u64) -> Slice2D {
    let spec = FoamSpec {
        n_spheres,
        seed,
        ..FoamSpec::default()
    };
    slice_phantom(&generate_foam(&spec).unwrap(), 0.0).unwrap()
}

// ---------------------------------------------------------------------------
// phantoms

#[test]
fn foam_spheres_are_disjoint_and_contained() {
    let spec = FoamSpec {
        n_spheres: 1000,
        seed: 7,
        ..FoamSpec::default()
    };
    let foam = generate_foam(&spec).unwrap();
    assert_eq!(foam.spheres.len(), 1000);
    assert_eq!(foam, generate_foam(&spec).unwrap());
    for (i, a) in foam.spheres.iter().enumerate() {
        assert!(a.r >= spec.r_min && a.r <= spec.r_max);
        assert!(a.cx.hypot(a.cy) + a.r <= spec.cylinder_radius);
        assert!(a.cz.abs() + a.r <= spec.z_extent);
        for b in &foam.spheres[i + 1..] {
            let d = ((a.cx - b.cx).powi(2) + (a.cy - b.cy).powi(2) + (a.cz - b.cz).powi(2)).sqrt();
            assert!(d >= a.r + b.r - 1e-12, "spheres overlap: {a:?} {b:?}");
        }
    }
}

#[test]
fn slice_hole_count_matches_direct_scan() {
    let foam = generate_foam(&FoamSpec::default()).unwrap();
    let slice = slice_phantom(&foam, 0.0).unwrap();
    let scanned = foam.spheres.iter().filter(|s| s.cz.abs() < s.r).count();
    assert_eq!(slice.holes.len(), scanned);
    for h in &slice.holes {
        assert!(h.cx.hypot(h.cy) + h.r <= slice.disc_radius);
    }
    for (i, a) in slice.holes.iter().enumerate() {
        for b in &slice.holes[i + 1..] {
            assert!((a.cx - b.cx).hypot(a.cy - b.cy) >= a.r + b.r - 1e-12);
        }
    }
}

#[test]
fn analytic_sinogram_matches_ray_quadrature() {
    let slice = small_foam_slice(1000, 0);
    let g = Geometry::new(32, 256, 256).unwrap();
    let ss = 4;
    let p = analytic_sinogram(&slice, &g, ss).unwrap();
    let scale = 128.0;
    let half_len = slice.disc_radius * scale;
    let samples = 10_000;
    let step = 2.0 * half_len / samples as f64;
    let mut got = Vec::new();
    let mut want = Vec::new();
    for a in (0..32).step_by(8) {
        let (sin, cos) = g.angles()[a].sin_cos();
        for k in (0..256).step_by(8) {
            let mut acc = 0.0;
            for s in 0..ss {
                let t = g.det_coord(k) + (s as f64 + 0.5) / ss as f64 - 0.5;
                let mut line = 0.0;
                for m in 0..samples {
                    let u = -half_len + (m as f64 + 0.5) * step;
                    let (x, y) = (t * cos - u * sin, t * sin + u * cos);
                    if slice.contains(x / scale, y / scale) {
                        line += step;
                    }
                }
                acc += line;
            }
            want.push(acc / ss as f64);
            got.push(p.get(a, k));
        }
    }
    assert!(rel_diff(&got, &want) <= 1e-3, "relative error {}", rel_diff(&got, &want));
}

#[test]
fn rasterized_disc_has_analytic_area() {
    let img = rasterize_slice(&Slice2D::disc(1.0), 256, 8).unwrap();
    let mass: f64 = img.values().iter().sum();
    let area = PI * 128.0 * 128.0;
    assert!((mass - area).abs() <= 1e-3 * area, "mass {mass} area {area}");
}

#[test]
fn analytic_sinogram_is_linear_in_the_holes() {
    let mut slice = small_foam_slice(1000, 3);
    slice.holes.truncate(20);
    let g = Geometry::new(12, 64, 64).unwrap();
    let disc = analytic_sinogram(&Slice2D::disc(slice.disc_radius), &g, 3).unwrap();
    let foam = analytic_sinogram(&slice, &g, 3).unwrap();
    let mut holes_only = vec![0.0; g.n_proj()];
    for h in &slice.holes {
        let one = Slice2D {
            disc_radius: slice.disc_radius,
            holes: vec![*h],
        };
        let with_hole = analytic_sinogram(&one, &g, 3).unwrap();
        for ((acc, d), w) in holes_only.iter_mut().zip(disc.values()).zip(with_hole.values()) {
            *acc += d - w;
        }
    }
    let removed: Vec<f64> = disc.values().iter().zip(foam.values()).map(|(d, f)| d - f).collect();
    assert!(max_abs_diff(&removed, &holes_only) <= 1e-12);
}

#[test]
fn analytic_sinogram_has_parallel_beam_symmetry() {
    // angles stay in [0, pi); the half-turn is applied to the phantom instead
    let slice = small_foam_slice(300, 5);
    let turned = Slice2D {
        disc_radius: slice.disc_radius,
        holes: slice.holes.iter().map(|h| Circle { cx: -h.cx, cy: -h.cy, r: h.r }).collect(),
    };
    let g = Geometry::new(10, 48, 48).unwrap();
    let p = analytic_sinogram(&slice, &g, 2).unwrap();
    let q = analytic_sinogram(&turned, &g, 2).unwrap();
    for a in 0..10 {
        let mut opposite = q.row(a).to_vec();
        opposite.reverse();
        assert!(max_abs_diff(p.row(a), &opposite) <= 1e-9);
    }
}

#[test]
fn poisson_noise_on_zero_data_is_small() {
    let g = Geometry::new(256, 256, 256).unwrap();
    let noisy = add_poisson_noise(&Sinogram::zeros(g), 1e6, 11).unwrap();
    let mean_abs = noisy.values().iter().map(|v| v.abs()).sum::<f64>() / noisy.values().len() as f64;
    assert!(mean_abs <= 3e-3, "mean abs {mean_abs}");
}

#[test]
fn poisson_variance_falls_with_flux() {
    let g = Geometry::new(64, 64, 64).unwrap();
    let p = Sinogram::from_values(g.clone(), vec![1.0; g.n_proj()]).unwrap();
    let variances: Vec<f64> = [1e3, 1e4, 1e5, 1e6]
        .iter()
        .map(|&flux| {
            let v = add_poisson_noise(&p, flux, 2).unwrap().into_values();
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
        })
        .collect();
    assert!(variances.windows(2).all(|w| w[1] < w[0]), "{variances:?}");
    assert_eq!(add_poisson_noise(&p, 1e4, 9).unwrap(), add_poisson_noise(&p, 1e4, 9).unwrap());
}

#[test]
fn zinger_count_is_floor_of_fraction() {
    let g = Geometry::new(512, 256, 256).unwrap();
    let p = Sinogram::from_values(g.clone(), vec![1.0; g.n_proj()]).unwrap();
    let z = add_zingers(&p, 1e-3, 3.0, 4).unwrap();
    let changed = p.values().iter().zip(z.values()).filter(|(a, b)| a != b).count();
    assert_eq!(changed, 131);
    assert!(z.values().iter().all(|&v| v == 1.0 || v == 3.0));
    assert_eq!(add_zingers(&p, 0.0, 3.0, 4).unwrap(), p);
    assert!(add_zingers(&p, 1.0, 3.0, 4).unwrap().values().iter().all(|&v| v == 3.0));
}

// ---------------------------------------------------------------------------
// projectors and reconstructors

#[test]
fn center_pixel_fills_center_bin_at_zero_angle() {
    let g = Geometry::with_angles(vec![0.0], 33, 33).unwrap();
    let p = forward_project(&single_pixel_phantom(33).unwrap(), &g).unwrap();
    for k in 0..33 {
        let want = if k == 16 { 1.0 } else { 0.0 };
        assert!((p.get(0, k) - want).abs() <= 1e-14);
    }
}

#[test]
fn disc_projection_matches_chords() {
    let slice = Slice2D::disc(0.8);
    let g = Geometry::new(32, 256, 256).unwrap();
    let raster = rasterize_slice(&slice, 256, 8).unwrap();
    let projected = forward_project(&raster, &g).unwrap();
    let analytic = analytic_sinogram(&slice, &g, 8).unwrap();
    let rms_err = diff_norm(projected.values(), analytic.values());
    let rms = norm(analytic.values());
    assert!(rms_err <= 0.02 * rms, "relative RMS {}", rms_err / rms);
}

#[test]
fn strip_backprojection_is_the_adjoint() {
    let g = Geometry::new(16, 40, 32).unwrap();
    for seed in 0..3 {
        let x = random_image(32, seed);
        let q = random_sinogram(&g, seed + 100);
        let wx = forward_project(&x, &g).unwrap();
        let wtq = backproject(KernelKind::Strip, &q).unwrap();
        let lhs: f64 = wx.values().iter().zip(q.values()).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.values().iter().zip(wtq.values()).map(|(a, b)| a * b).sum::<f64>() / (PI / 16.0);
        assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()), "{lhs} vs {rhs}");
    }
}

#[test]
fn zero_inputs_give_zero_images() {
    let g = Geometry::new(8, 24, 20).unwrap();
    let zero = Sinogram::zeros(g.clone());
    let p = random_sinogram(&g, 1);
    let h0 = FilterSpec::zeros(24).unwrap();
    for kind in KernelKind::ALL {
        let rec = Reconstructor::new(kind, g.clone()).unwrap();
        assert!(rec.reconstruct(&zero).unwrap().values().iter().all(|&v| v == 0.0));
        assert!(fbp(&rec, &p, &h0).unwrap().values().iter().all(|&v| v == 0.0));
    }
    assert!(matches!(backproject(KernelKind::FourierGrid, &zero), Err(Error::InvalidArgument(_))));
    assert!(forward_project(&ImageGrid::zeros(20), &g).unwrap().values().iter().all(|&v| v == 0.0));
}

#[test]
fn every_reconstructor_is_linear() {
    let g = Geometry::new(12, 36, 32).unwrap();
    let q1 = random_sinogram(&g, 2);
    let q2 = random_sinogram(&g, 3);
    let sum = Sinogram::from_values(g.clone(), q1.values().iter().zip(q2.values()).map(|(a, b)| a + b).collect()).unwrap();
    for kind in KernelKind::ALL {
        let rec = Reconstructor::new(kind, g.clone()).unwrap();
        let r1 = rec.reconstruct(&q1).unwrap();
        let r2 = rec.reconstruct(&q2).unwrap();
        let r12 = rec.reconstruct(&sum).unwrap();
        let added: Vec<f64> = r1.values().iter().zip(r2.values()).map(|(a, b)| a + b).collect();
        assert!(rel_diff(r12.values(), &added) <= 1e-9, "{kind}");
    }
}

#[test]
fn fbp_is_linear_in_the_filter() {
    let g = Geometry::new(10, 32, 32).unwrap();
    let p = random_sinogram(&g, 4);
    let h1 = standard_filter("ram-lak", 32).unwrap();
    let h2 = standard_filter("shepp-logan", 32).unwrap();
    let (a, b) = (0.7, -2.3);
    let combined = FilterSpec::combine(&[(a, &h1), (b, &h2)]).unwrap();
    for kind in KernelKind::ALL {
        let rec = Reconstructor::new(kind, g.clone()).unwrap();
        let r1 = fbp(&rec, &p, &h1).unwrap();
        let r2 = fbp(&rec, &p, &h2).unwrap();
        let rc = fbp(&rec, &p, &combined).unwrap();
        let want: Vec<f64> = r1.values().iter().zip(r2.values()).map(|(x, y)| a * x + b * y).collect();
        assert!(rel_diff(rc.values(), &want) <= 1e-9, "{kind}");
    }
}

fn disc_rmse(kind: KernelKind, n_angles: usize) -> f64 {
    let slice = Slice2D::disc(0.5);
    let g = Geometry::new(n_angles, 256, 256).unwrap();
    let p = analytic_sinogram(&slice, &g, 4).unwrap();
    let gt = rasterize_slice(&slice, 256, 8).unwrap();
    let rec = Reconstructor::new(kind, g).unwrap();
    rmse(&fbp(&rec, &p, &standard_filter("ram-lak", 256).unwrap()).unwrap(), &gt).unwrap()
}

#[test]
fn strip_ramlak_reconstructs_a_disc() {
    let e = disc_rmse(KernelKind::Strip, 512);
    assert!(e <= 0.05, "rmse {e}");
}

#[test]
fn fourier_gridding_reconstructs_a_disc() {
    let e = disc_rmse(KernelKind::FourierGrid, 1024);
    assert!(e <= 0.05, "rmse {e}");
}

#[test]
fn implementations_differ_on_a_single_pixel() {
    let g = Geometry::new(8, 33, 33).unwrap();
    let p = forward_project(&single_pixel_phantom(33).unwrap(), &g).unwrap();
    let ramp = standard_filter("ram-lak", 33).unwrap();
    let recs: Vec<ImageGrid> = KernelKind::ALL
        .iter()
        .map(|&k| fbp(&Reconstructor::new(k, g.clone()).unwrap(), &p, &ramp).unwrap())
        .collect();
    for i in 0..recs.len() {
        for j in i + 1..recs.len() {
            let d = max_abs_diff(recs[i].values(), recs[j].values());
            assert!(d > 1e-3, "{} vs {}: {d}", KernelKind::ALL[i], KernelKind::ALL[j]);
        }
    }
    let line = backproject(KernelKind::Line, &p).unwrap();
    let pixel = backproject(KernelKind::PixelDriven, &p).unwrap();
    assert!(max_abs_diff(line.values(), pixel.values()) > 1e-3);
}

#[test]
fn reconstruction_is_deterministic() {
    let g = Geometry::new(16, 48, 40).unwrap();
    let p = random_sinogram(&g, 8);
    let h = standard_filter("shepp-logan", 48).unwrap();
    for kind in KernelKind::ALL {
        let rec = Reconstructor::new(kind, g.clone()).unwrap();
        assert_eq!(fbp(&rec, &p, &h).unwrap(), fbp(&rec, &p, &h).unwrap());
    }
}

#[test]
fn sirt_recovers_a_single_pixel() {
    let x = single_pixel_phantom(33).unwrap();
    let g = Geometry::new(64, 33, 33).unwrap();
    let p = forward_project(&x, &g).unwrap();
    let r = sirt(&p, &g, 800).unwrap();
    let e = rmse(&r, &x).unwrap();
    assert!(e <= 1e-2, "rmse {e}");
}

#[test]
fn sirt_residual_is_non_increasing() {
    let x = rasterize_slice(&small_foam_slice(200, 1), 48, 4).unwrap();
    let g = Geometry::new(24, 48, 48).unwrap();
    let p = forward_project(&x, &g).unwrap();
    let mut history = Vec::new();
    sirt_monitored(&p, &g, 100, |_, r| history.push(r)).unwrap();
    assert_eq!(history.len(), 100);
    for w in history.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12), "{} then {}", w[0], w[1]);
    }
    let zero = sirt(&Sinogram::zeros(g.clone()), &g, 7).unwrap();
    assert!(zero.values().iter().all(|&v| v == 0.0));
}

// ---------------------------------------------------------------------------
// filters

#[test]
fn ramlak_delta_response_is_the_closed_form_kernel() {
    let n_det = 512;
    let g = Geometry::new(1, n_det, n_det).unwrap();
    let mut delta = vec![0.0; n_det];
    let c = n_det / 2;
    delta[c] = 1.0;
    let out = apply_filter(&Sinogram::from_values(g, delta).unwrap(), &standard_filter("ram-lak", n_det).unwrap()).unwrap();
    for d in 0..24usize {
        let want = if d == 0 {
            0.25
        } else if d % 2 == 1 {
            -1.0 / (PI * PI * (d * d) as f64)
        } else {
            0.0
        };
        assert!((out.get(0, c + d) - want).abs() <= 1e-6, "offset {d}");
        assert!((out.get(0, c - d) - want).abs() <= 1e-6, "offset -{d}");
    }
}

#[test]
fn shepp_logan_nyquist_ratio() {
    let rl = standard_filter("ram-lak", 100).unwrap();
    let sl = standard_filter("shepp-logan", 100).unwrap();
    let ny = rl.fourier().len() - 1;
    assert!((sl.fourier()[ny] / rl.fourier()[ny] - 2.0 / PI).abs() <= 1e-12);
    assert_eq!(rl.fourier()[0], 0.0);
}

#[test]
fn identity_filter_and_linearity_of_filtering() {
    let g = Geometry::new(6, 37, 37).unwrap();
    let p = random_sinogram(&g, 12);
    let out = apply_filter(&p, &FilterSpec::identity(37).unwrap()).unwrap();
    assert!(max_abs_diff(out.values(), p.values()) <= 1e-12);

    let b = expbin_basis(37, 4).unwrap();
    let mut r = rng(5);
    let h1 = b.filter((0..b.len()).map(|_| r.random::<f64>()).collect()).unwrap();
    let h2 = b.filter((0..b.len()).map(|_| r.random::<f64>() - 0.5).collect()).unwrap();
    let (a1, a2) = (1.5, -0.25);
    let both = apply_filter(&p, &FilterSpec::combine(&[(a1, &h1), (a2, &h2)]).unwrap()).unwrap();
    let q1 = apply_filter(&p, &h1).unwrap();
    let q2 = apply_filter(&p, &h2).unwrap();
    let want: Vec<f64> = q1.values().iter().zip(q2.values()).map(|(x, y)| a1 * x + a2 * y).collect();
    assert!(rel_diff(both.values(), &want) <= 1e-12);
}

/// Bin widths listed by walking offsets one at a time.
fn enumerate_widths(n_det: usize, n_l: usize) -> Vec<usize> {
    let mut widths = Vec::new();
    let mut current = 0;
    let mut filled = 0;
    for _offset in 0..=n_det / 2 {
        let cap = if widths.len() <= n_l { 1 } else { 1 << (widths.len() - n_l) };
        filled += 1;
        current += 1;
        if filled == cap {
            widths.push(current);
            current = 0;
            filled = 0;
        }
    }
    if current > 0 {
        widths.push(current);
    }
    widths
}

#[test]
fn expbin_widths_match_enumeration() {
    let small = expbin_basis(8, 4).unwrap();
    assert_eq!(small.len(), 5);
    assert_eq!(small.bins().iter().map(|b| b.width).collect::<Vec<_>>(), vec![1; 5]);
    assert_eq!(small.bins()[4].start, 4);

    let big = expbin_basis(256, 16).unwrap();
    let widths: Vec<usize> = big.bins().iter().map(|b| b.width).collect();
    assert_eq!(widths, enumerate_widths(256, 16));
    assert_eq!(&widths[17..], &[2, 4, 8, 16, 32, 50]);
    assert_eq!(big.len(), 23);

    for n_det in [2, 5, 8, 33, 100, 256, 511] {
        for n_l in 1..=n_det / 2 {
            let b = expbin_basis(n_det, n_l).unwrap();
            let w: Vec<usize> = b.bins().iter().map(|b| b.width).collect();
            assert_eq!(w, enumerate_widths(n_det, n_l));
            let mirrored = 2 * w.iter().sum::<usize>() - 1;
            assert!(mirrored == n_det || mirrored == n_det + 1);
        }
        assert!(expbin_basis(n_det, 0).is_err());
        assert!(expbin_basis(n_det, n_det / 2 + 1).is_err());
    }
}

fn tiny_instance() -> (Sinogram, Reconstructor) {
    let g = Geometry::new(4, 8, 8).unwrap();
    let x = rasterize_slice(&Slice2D {
        disc_radius: 0.9,
        holes: vec![Circle { cx: 0.2, cy: -0.1, r: 0.3 }],
    }, 8, 8)
    .unwrap();
    let p = forward_project(&x, &g).unwrap();
    (p, Reconstructor::new(KernelKind::Strip, g).unwrap())
}

#[test]
fn tiny_instance_matches_normal_equations() {
    let (p, rec) = tiny_instance();
    let basis = expbin_basis(8, 2).unwrap();
    let system = projection_system(&p, &rec, &basis).unwrap();

    // columns by the per-basis pipeline, spelled out
    for j in 0..basis.len() {
        let q = apply_filter(&p, &basis.basis_filter(j)).unwrap();
        let col = forward_project(&rec.reconstruct(&q).unwrap(), rec.geometry()).unwrap();
        let got: Vec<f64> = system.matrix.column(j).iter().copied().collect();
        assert_eq!(got, col.values(), "column {j}");
    }

    let f = DMatrix::from_fn(p.values().len(), basis.len(), |i, j| system.matrix[(i, j)]);
    let target = DVector::from_column_slice(p.values());
    let normal = f.transpose() * &f;
    let rhs = f.transpose() * &target;
    let oracle = normal.cholesky().expect("well-posed tiny system").solve(&rhs);

    let h = compute_adapted_filter(&p, &rec, &basis, 0.0).unwrap();
    let scale = oracle.norm();
    for (c, o) in h.coeffs().iter().zip(oracle.iter()) {
        assert!((c - o).abs() <= 1e-8 * scale, "{c} vs {o}");
    }
}

#[test]
fn adapted_filter_minimizes_the_residual() {
    let (p, rec) = tiny_instance();
    let basis = expbin_basis(8, 2).unwrap();
    let system = projection_system(&p, &rec, &basis).unwrap();
    let h = compute_adapted_filter(&p, &rec, &basis, 0.0).unwrap();
    let best = system.residual_norm(h.coeffs());
    assert!((best - projection_residual(&p, &rec, &h).unwrap()).abs() <= 1e-9 * norm(p.values()));
    let mut r = rng(21);
    let slack = 1e-8 * norm(p.values());
    for _ in 0..100 {
        let c: Vec<f64> = h.coeffs().iter().map(|v| v + r.random_range(-1.0..1.0) * (0.1 + v.abs())).collect();
        assert!(best <= system.residual_norm(&c) + slack);
    }
}

#[test]
fn adapted_filter_is_scale_invariant() {
    let slice = small_foam_slice(150, 2);
    let g = Geometry::new(12, 32, 32).unwrap();
    let p = analytic_sinogram(&slice, &g, 2).unwrap();
    let scaled = Sinogram::from_values(g.clone(), p.values().iter().map(|v| 3.7 * v).collect()).unwrap();
    let basis = expbin_basis(32, 4).unwrap();
    for kind in [KernelKind::Strip, KernelKind::FourierGrid] {
        let rec = Reconstructor::new(kind, g.clone()).unwrap();
        let a = compute_adapted_filter(&p, &rec, &basis, 0.0).unwrap();
        let b = compute_adapted_filter(&scaled, &rec, &basis, 0.0).unwrap();
        assert!(rel_diff(b.coeffs(), a.coeffs()) <= 1e-8, "{kind}");
    }
}

#[test]
fn zero_targets_give_zero_filters() {
    let g = Geometry::new(6, 16, 16).unwrap();
    let basis = expbin_basis(16, 2).unwrap();
    let rec = Reconstructor::new(KernelKind::Line, g.clone()).unwrap();
    let h = compute_adapted_filter(&Sinogram::zeros(g.clone()), &rec, &basis, 0.0).unwrap();
    assert!(h.coeffs().iter().all(|&c| c == 0.0));
    let p = random_sinogram(&g, 6);
    let h = compute_reference_filter(&p, &rec, &ImageGrid::zeros(16), &basis).unwrap();
    assert!(h.coeffs().iter().all(|&c| c.abs() <= 1e-14));
}

#[test]
fn reference_filter_recovers_a_representable_target() {
    let slice = small_foam_slice(150, 4);
    let g = Geometry::new(10, 32, 32).unwrap();
    let p = analytic_sinogram(&slice, &g, 2).unwrap();
    let basis = expbin_basis(32, 4).unwrap();
    let mut r = rng(30);
    let h0 = basis.filter((0..basis.len()).map(|_| r.random_range(-1.0..1.0)).collect()).unwrap();
    for kind in [KernelKind::Line, KernelKind::PixelDriven] {
        let rec = Reconstructor::new(kind, g.clone()).unwrap();
        let r_ref = fbp(&rec, &p, &h0).unwrap();
        let h = compute_reference_filter(&p, &rec, &r_ref, &basis).unwrap();
        let back = fbp(&rec, &p, &h).unwrap();
        assert!(rel_diff(back.values(), r_ref.values()) <= 1e-6, "{kind}");
    }
}

#[test]
fn filter_files_round_trip_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    let basis = expbin_basis(64, 4).unwrap();
    let mut r = rng(8);
    let h = basis
        .filter((0..basis.len()).map(|_| r.random::<f64>() * 1e-3 - 3e-4).collect())
        .unwrap()
        .with_zero_dc(true);
    let path = dir.path().join("h.json");
    write_filter(&path, &h).unwrap();
    let back = read_filter(&path).unwrap();
    assert_eq!(back.coeffs(), h.coeffs());
    assert_eq!(back.fourier(), h.fourier());
    assert!(back.zero_dc_applied());

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n_det": 8, "basis": {"type": "expbin", "n_l": 5}, "coeffs": ["1"], "zero_dc": false}"#).unwrap();
    assert!(matches!(read_filter(&bad), Err(Error::Format { .. })));
    std::fs::write(&bad, r#"{"n_det": 8, "basis": {"type": "wavelet"}, "coeffs": [], "zero_dc": false}"#).unwrap();
    assert!(matches!(read_filter(&bad), Err(Error::Format { .. })));

    let ones = dir.path().join("ones.json");
    let n_coeffs = padded_len(8) / 2 + 1;
    let coeffs = vec!["\"1\""; n_coeffs].join(",");
    std::fs::write(&ones, format!(r#"{{"n_det": 8, "basis": {{"type": "spectral"}}, "coeffs": [{coeffs}], "zero_dc": false}}"#)).unwrap();
    let id = read_filter(&ones).unwrap();
    assert_eq!(id.basis(), BasisDescriptor::Spectral);
    let g = Geometry::new(3, 8, 8).unwrap();
    let p = random_sinogram(&g, 13);
    assert!(max_abs_diff(apply_filter(&p, &id).unwrap().values(), p.values()) <= 1e-12);
}

#[test]
fn nested_basis_never_fits_worse() {
    let coarse = expbin_basis(32, 4).unwrap();
    let fine = expbin_basis(32, 8).unwrap();
    for b in coarse.bins() {
        let inner: Vec<_> = fine.bins().iter().filter(|f| f.start >= b.start && f.start < b.start + b.width).collect();
        assert_eq!(inner.first().map(|f| f.start), Some(b.start));
        assert_eq!(inner.iter().map(|f| f.width).sum::<usize>(), b.width);
    }
    let slice = small_foam_slice(150, 6);
    let g = Geometry::new(8, 32, 32).unwrap();
    let p = analytic_sinogram(&slice, &g, 2).unwrap();
    let slack = 1e-8 * norm(p.values());
    for kind in KernelKind::ALL {
        let rec = Reconstructor::new(kind, g.clone()).unwrap();
        let rc = projection_residual(&p, &rec, &compute_adapted_filter(&p, &rec, &coarse, 0.0).unwrap()).unwrap();
        let rf = projection_residual(&p, &rec, &compute_adapted_filter(&p, &rec, &fine, 0.0).unwrap()).unwrap();
        assert!(rf <= rc + slack, "{kind}: {rf} > {rc}");
    }
}

#[test]
fn detector_flip_rotates_the_reconstruction() {
    let slice = small_foam_slice(150, 7);
    let g = Geometry::new(8, 32, 32).unwrap();
    let p = analytic_sinogram(&slice, &g, 2).unwrap();
    let flipped = p.flip_detector();
    let basis = expbin_basis(32, 4).unwrap();
    let rec = Reconstructor::new(KernelKind::Strip, g).unwrap();
    let h = compute_adapted_filter(&p, &rec, &basis, 0.0).unwrap();
    let hf = compute_adapted_filter(&flipped, &rec, &basis, 0.0).unwrap();
    assert!(rel_diff(hf.coeffs(), h.coeffs()) <= 1e-8);
    let r = fbp(&rec, &p, &h).unwrap();
    let mut rotated = fbp(&rec, &flipped, &h).unwrap().into_values();
    rotated.reverse();
    assert!(rel_diff(&rotated, r.values()) <= 1e-9);
}

// ---------------------------------------------------------------------------
// metrics

fn random_set(k: usize, n: usize, seed: u64) -> ReconSet {
    ReconSet::from_members((0..k).map(|i| (format!("m{i}"), random_image(n, seed + i as u64))).collect()).unwrap()
}

#[test]
fn pixelwise_std_matches_two_pass_loop() {
    let set = random_set(5, 16, 40);
    let sigma = pixelwise_std(&set).unwrap();
    for px in 0..256 {
        let vals: Vec<f64> = set.members().iter().map(|(_, m)| m.values()[px]).collect();
        let mean = vals.iter().sum::<f64>() / 5.0;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 5.0;
        assert!((sigma.values()[px] - var.sqrt()).abs() <= 1e-12);
    }
    let mut total = 0.0;
    for v in sigma.values() {
        total += v;
    }
    assert!((mean_std(&sigma) - total / 256.0).abs() <= 1e-12);
}

#[test]
fn rmse_and_bias_match_direct_loops() {
    let a = random_image(16, 50);
    let b = random_image(16, 51);
    let mut acc = 0.0;
    for i in 0..16 {
        for j in 0..16 {
            acc += (a.get(i, j) - b.get(i, j)).powi(2);
        }
    }
    assert!((rmse(&a, &b).unwrap() - (acc / 256.0).sqrt()).abs() <= 1e-12);

    let set = random_set(4, 16, 60);
    let (map, mean) = squared_bias(&set, &b).unwrap();
    let mut total = 0.0;
    for px in 0..256 {
        let avg = set.members().iter().map(|(_, m)| m.values()[px]).sum::<f64>() / 4.0;
        let want = (avg - b.values()[px]).powi(2);
        assert!((map.values()[px] - want).abs() <= 1e-12);
        total += want;
    }
    assert!((mean - total / 256.0).abs() <= 1e-12);

    let single = ReconSet::from_members(vec![("only".into(), a.clone())]).unwrap();
    let (_, m) = squared_bias(&single, &b).unwrap();
    assert!((rmse(&a, &b).unwrap().powi(2) - m).abs() <= 1e-12);
}

/// Exhaustive between-class variance search over 256 bins.
fn otsu_oracle(r: &ImageGrid) -> f64 {
    let (lo, hi) = r.min_max();
    let width = (hi - lo) / OTSU_BINS as f64;
    let mut counts = vec![0.0; OTSU_BINS];
    for &v in r.values() {
        let b = (((v - lo) / width) as usize).min(OTSU_BINS - 1);
        counts[b] += 1.0;
    }
    let centre = |b: usize| lo + (b as f64 + 0.5) * width;
    let mut best = (f64::NEG_INFINITY, 0);
    for split in 0..OTSU_BINS - 1 {
        let (mut w0, mut s0, mut w1, mut s1) = (0.0, 0.0, 0.0, 0.0);
        for (b, &c) in counts.iter().enumerate() {
            if b <= split {
                w0 += c;
                s0 += c * centre(b);
            } else {
                w1 += c;
                s1 += c * centre(b);
            }
        }
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let between = w0 * w1 * (s0 / w0 - s1 / w1).powi(2);
        if between > best.0 * (1.0 + 1e-12) {
            best = (between, split);
        }
    }
    centre(best.1)
}

#[test]
fn otsu_matches_exhaustive_search_and_is_affine_equivariant() {
    let mut r = rng(70);
    let vals: Vec<f64> = (0..4096)
        .map(|i| if i % 3 == 0 { 0.2 + 0.1 * r.random::<f64>() } else { 0.7 + 0.2 * r.random::<f64>() })
        .collect();
    let img = ImageGrid::from_values(64, vals).unwrap();
    let t = otsu_threshold(&img).unwrap();
    assert!((t - otsu_oracle(&img)).abs() <= 1e-12);
    let (lo, hi) = img.min_max();
    for (a, b) in [(2.0, -1.0), (0.1, 5.0), (37.0, 0.0)] {
        let mapped = otsu_threshold(&img.map(|v| a * v + b)).unwrap();
        assert!((mapped - (a * t + b)).abs() <= a * (hi - lo) / OTSU_BINS as f64 + 1e-9);
    }
    let seg = segment(&img, t);
    let ones = seg.values().iter().filter(|&&v| v == 1.0).count();
    assert_eq!(ones, 4096 - 4096usize.div_ceil(3));
}

#[test]
fn f1_and_jaccard_match_counting() {
    let mut r = rng(80);
    for _ in 0..20 {
        let a = ImageGrid::from_values(12, (0..144).map(|_| if r.random::<bool>() { 1.0 } else { 0.0 }).collect()).unwrap();
        let b = ImageGrid::from_values(12, (0..144).map(|_| if r.random::<bool>() { 1.0 } else { 0.0 }).collect()).unwrap();
        let (f1, j) = f1_jaccard(&a, &b).unwrap();
        let (mut tp, mut fp, mut fn_) = (0.0, 0.0, 0.0);
        for (x, y) in a.values().iter().zip(b.values()) {
            match (*x == 1.0, *y == 1.0) {
                (true, true) => tp += 1.0,
                (true, false) => fp += 1.0,
                (false, true) => fn_ += 1.0,
                _ => {}
            }
        }
        assert!((f1 - tp / (tp + 0.5 * (fp + fn_))).abs() <= 1e-12);
        assert!((j - tp / (tp + fp + fn_)).abs() <= 1e-12);
        assert!((f1 - 2.0 * j / (1.0 + j)).abs() <= 1e-12);
    }
}

#[test]
fn histogram_matches_direct_counting() {
    let vals: Vec<f64> = (0..100).map(|i| (i % 10) as f64 * 0.1 + 0.01).collect();
    let sigma = ImageGrid::from_values(10, vals).unwrap();
    let h = std_histogram(&sigma, 3).unwrap();
    assert_eq!(h.counts, vec![30, 30, 40]);
    assert_eq!(h.total(), 100);
    assert_eq!(h.mode_bin(), 2);
    let wide = histogram_range(&sigma, 4, 1.8).unwrap();
    assert_eq!(wide.counts, vec![50, 40, 10, 0]);
    assert_eq!(wide.mode_bin(), 0);
    let zero = std_histogram(&ImageGrid::zeros(4), 5).unwrap();
    assert_eq!(zero.counts[0], 16);
    assert_eq!(zero.mode_bin(), 0);
}
