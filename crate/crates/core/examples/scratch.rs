// Temporary diagnostic; removed before release.
use latnet_core::estimation::{FitConfig, estimate_rho, fit_pgd, svt_init};
use latnet_core::experiments::align_truth_estimate;
use latnet_core::inference::covariance_bundle;
use latnet_core::simulation::{ReplicationStream, SettingKind, SimSetting};
use latnet_core::stats;
use rayon::prelude::*;
use std::time::Instant;

fn main() {
    let n = 300usize;
    let setting = SimSetting::<f64>::new(SettingKind::BoundedIndep, n, 8);
    let stream = ReplicationStream::new(setting).unwrap();
    let spec = *stream.spec();
    let cfg = FitConfig::defaults(&spec, n).with_max_iters(40_000);
    let truth = stream.truth();

    let gram = truth.state.z.t().dot(&truth.state.z) / n as f64;
    println!(
        "truth gram diag: {:.4} {:.4}, z11*={:.4}, z12*={:.4}",
        gram[(0, 0)],
        gram[(1, 1)],
        truth.state.z[(0, 0)],
        truth.state.z[(0, 1)]
    );

    let reps = 40;
    let t0 = Instant::now();
    let rows: Vec<(f64, f64, f64, bool, usize, f64, f64)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let net = stream.network(rep).unwrap();
            let init = svt_init(&net, &spec).unwrap();
            let fit = fit_pgd(&net, &spec, &cfg, &init).unwrap();
            let (_, centered) = estimate_rho(&fit.state);
            let aligned = align_truth_estimate(&truth.state, &centered).unwrap();
            let bundle = covariance_bundle(&net, &aligned, &spec, &[0], 1.0).unwrap();
            let var_hat = bundle.scaled_variance_block(0, n).unwrap()[(0, 0)];
            let eg = aligned.z.t().dot(&aligned.z) / n as f64;
            (
                aligned.z[(0, 0)],
                var_hat.sqrt(),
                eg[(0, 0)],
                fit.converged,
                fit.iterations,
                fit.score_norm,
                eg[(1, 1)],
            )
        })
        .collect();
    let dt = t0.elapsed().as_secs_f64();

    let z11s: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let sds: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let conv = rows.iter().filter(|r| r.3).count();
    let mean_iters = rows.iter().map(|r| r.4 as f64).sum::<f64>() / reps as f64;
    let mean_sn = rows.iter().map(|r| r.5).sum::<f64>() / reps as f64;
    let mean_g0 = rows.iter().map(|r| r.2).sum::<f64>() / reps as f64;
    let mean_g1 = rows.iter().map(|r| r.6).sum::<f64>() / reps as f64;

    let (mean_z11, var_z11) = stats::mean_var(&z11s);
    let mean_sd = sds.iter().sum::<f64>() / sds.len() as f64;
    // coverage at 0.95
    let zq = stats::normal_two_sided(0.95);
    let covered = z11s
        .iter()
        .zip(&sds)
        .filter(|(z, s)| (truth.state.z[(0, 0)] - **z).abs() <= zq * **s)
        .count();
    println!(
        "mean est gram diag: {mean_g0:.4} {mean_g1:.4} | z11hat mean {:.4} bias {:+.4} emp-sd {:.4} plugin-sd {:.4} ratio {:.2}",
        mean_z11,
        mean_z11 - truth.state.z[(0, 0)],
        var_z11.sqrt(),
        mean_sd,
        var_z11.sqrt() / mean_sd
    );
    println!(
        "converged {conv}/{reps} mean-iters {mean_iters:.0} mean-score-norm {mean_sn:.4} cover95 {covered}/{reps} wall {dt:.1}s"
    );
    // list outliers
    for (rep, r) in rows.iter().enumerate() {
        if (r.0 - truth.state.z[(0, 0)]).abs() > 3.0 * r.1 {
            println!("  outlier rep {rep}: z11hat {:.4} sd {:.4}", r.0, r.1);
        }
    }
}
