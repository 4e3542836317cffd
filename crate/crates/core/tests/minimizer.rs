use hedgehog::minimizer::{energy_difference_expansion, minimize, MinOptions};
use hedgehog::profile::{solve_profile, RadialGrid};
use hedgehog::shell::{hedgehog_on_grid, random_admissible, random_perturbation, ShellGrid};
use hedgehog::ScalingParams;

#[test]
fn coarse_descent_returns_to_the_hedgehog() {
    let (r, t) = (1.5, 5.0);
    let p = ScalingParams::new(t).unwrap();
    let prof = solve_profile(r, &p, &RadialGrid::uniform(r, 513).unwrap(), 1e-11).unwrap();
    let g = ShellGrid::new(r, 12, 8, 16).unwrap();
    let h = hedgehog_on_grid(&g, &prof).unwrap();
    let opts = MinOptions { tol: 1e-8, ..Default::default() };
    let (reference, _) = minimize(&h, &p, &g, &opts, &h).unwrap();
    for seed in 0..3 {
        let init = random_admissible(&g, &prof, 0.5, seed).unwrap();
        let (res, _) = minimize(&init, &p, &g, &opts, &h).unwrap();
        assert!(res.converged, "{}", res.message);
        assert!(res.final_energy <= res.initial_energy);
        assert!((res.final_energy - reference.final_energy).abs() <= 1e-8 * reference.final_energy.abs());
    }
}

#[test]
fn expansion_tracks_the_direct_difference() {
    let (r, t) = (1.5, 5.0);
    let p = ScalingParams::new(t).unwrap();
    let prof = solve_profile(r, &p, &RadialGrid::uniform(r, 513).unwrap(), 1e-11).unwrap();
    let g = ShellGrid::new(r, 12, 8, 16).unwrap();
    for seed in 0..5 {
        let v = random_perturbation(&g, seed).scaled(0.3);
        let e = energy_difference_expansion(&prof, &g, &v).unwrap();
        assert!(e.relative_error() < 1e-10, "{e:?}");
    }
}
