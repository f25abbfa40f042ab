use atomstress::config::RunConfig;
use atomstress::experiments::run_experiment_4;

fn main() {
    let cfg = RunConfig::parse("[experiment]\n").unwrap();
    let out = std::path::PathBuf::from("/tmp/exp4_probe");
    std::fs::create_dir_all(&out).unwrap();
    let t0 = std::time::Instant::now();
    let r = run_experiment_4(&cfg, &out).unwrap();
    println!("elapsed: {:?}", t0.elapsed());
    println!("concentration = {:.4}", r.concentration);
    println!("hardy max rel err = {:.4} in window {:?}", r.hardy_line_max_rel_err, r.trusted_window);
    println!("hardy peak = {:.4}, da peak = {:.4}, gap = {:+.5}", r.hardy_peak, r.da_peak, r.hardy_peak - r.da_peak);
    println!("shear: mean diff = {:.6}, peak = {:.5}, ratio = {:.4}", r.shear_mean_abs_diff, r.shear_peak, r.shear_mean_abs_diff / r.shear_peak);
}
