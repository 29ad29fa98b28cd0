//! Exercises the C surface the way a foreign caller would: raw pointers,
//! flat arrays, and status codes.

use asca_ffi::*;
use std::ptr;

fn default_params() -> AscaParams {
    asca_params_default()
}

#[test]
fn params_default_matches_library() {
    let p = default_params();
    assert_eq!(p.d_min, 5.0);
    assert_eq!(p.v_max, 15.0);
    assert_eq!(p.dt, 0.02);
    assert_eq!(p.t_final, 200.0);
    assert_eq!(p.d_final, 0.05);
    assert_eq!(p.use_min_separation_activation, 0);
    unsafe {
        assert!((asca_avoidance_radius(&p) - 2.8).abs() < 1e-12);
        assert!(asca_avoidance_radius(ptr::null()).is_nan());
    }
}

#[test]
fn two_agent_head_on_run_2d() {
    // A 2D head-on pair 60 m apart; swap positions.
    let starts = [0.0f64, 0.0, 60.0, 0.0];
    let goals = [60.0f64, 0.0, 0.0, 0.0];
    let params = default_params();
    let mut sim: *mut AscaSim = ptr::null_mut();
    unsafe {
        let status = asca_sim_new(2, 2, starts.as_ptr(), goals.as_ptr(), &params, &mut sim);
        assert_eq!(status, AscaStatus::Ok);
        assert_eq!(asca_sim_agent_count(sim), 2);
        assert_eq!(asca_sim_step_count(sim), 0);

        assert_eq!(asca_sim_step(sim), AscaStatus::Ok);
        assert_eq!(asca_sim_step_count(sim), 1);
        assert!((asca_sim_time(sim) - 0.02).abs() < 1e-12);

        let mut outcome = AscaOutcome {
            converged: 0,
            steps: 0,
            elapsed_sim_time: 0.0,
            d_max_final: 0.0,
        };
        assert_eq!(
            asca_sim_run_to_completion(sim, &mut outcome),
            AscaStatus::Ok
        );
        assert_eq!(outcome.converged, 1);
        assert_eq!(asca_sim_converged(sim), 1);
        assert!(outcome.d_max_final < params.d_final);
        assert!(outcome.elapsed_sim_time > 0.0);

        // The safety guarantee holds over the whole run.
        assert!(asca_sim_min_separation(sim) >= params.d_min);

        let mut positions = [0.0f64; 4];
        assert_eq!(
            asca_sim_positions(sim, positions.as_mut_ptr(), positions.len()),
            AscaStatus::Ok
        );
        let dist0 = ((positions[0] - 60.0).powi(2) + positions[1].powi(2)).sqrt();
        assert!(dist0 < params.d_final);

        let mut velocities = [0.0f64; 4];
        assert_eq!(
            asca_sim_velocities(sim, velocities.as_mut_ptr(), velocities.len()),
            AscaStatus::Ok
        );

        asca_sim_free(sim);
    }
}

#[test]
fn three_dimensional_run() {
    // Two agents on a vertical axis offset so projections stay regular.
    let starts = [0.0f64, 0.0, 30.0, 25.0, 20.0, -30.0];
    let goals = [25.0f64, 20.0, -30.0, 0.0, 0.0, 30.0];
    let params = default_params();
    let mut sim: *mut AscaSim = ptr::null_mut();
    unsafe {
        let status = asca_sim_new(3, 2, starts.as_ptr(), goals.as_ptr(), &params, &mut sim);
        assert_eq!(status, AscaStatus::Ok);
        assert_eq!(
            asca_sim_run_to_completion(sim, ptr::null_mut()),
            AscaStatus::Ok
        );
        assert_eq!(asca_sim_converged(sim), 1);
        assert!(asca_sim_min_separation(sim) >= params.d_min);
        let mut positions = [0.0f64; 6];
        assert_eq!(
            asca_sim_positions(sim, positions.as_mut_ptr(), positions.len()),
            AscaStatus::Ok
        );
        asca_sim_free(sim);
    }
}

#[test]
fn obstacle_avoidance_through_ffi() {
    let starts = [0.0f64, 0.0];
    let goals = [40.0f64, 0.0];
    let params = default_params();
    let mut sim: *mut AscaSim = ptr::null_mut();
    unsafe {
        assert_eq!(
            asca_sim_new(2, 1, starts.as_ptr(), goals.as_ptr(), &params, &mut sim),
            AscaStatus::Ok
        );
        let position = [20.0f64, 0.0];
        assert_eq!(
            asca_sim_add_obstacle(sim, position.as_ptr(), 3.0, ptr::null()),
            AscaStatus::Ok
        );
        assert_eq!(
            asca_sim_run_to_completion(sim, ptr::null_mut()),
            AscaStatus::Ok
        );
        assert_eq!(asca_sim_converged(sim), 1);
        // Obstacles cannot be added after stepping.
        assert_eq!(
            asca_sim_add_obstacle(sim, position.as_ptr(), 3.0, ptr::null()),
            AscaStatus::InvalidArgument
        );
        asca_sim_free(sim);
    }
}

#[test]
fn error_paths() {
    let params = default_params();
    let starts = [0.0f64, 0.0, 1.0, 0.0];
    let goals = [30.0f64, 0.0, -30.0, 0.0];
    let mut sim: *mut AscaSim = ptr::null_mut();
    unsafe {
        // Null pointers.
        assert_eq!(
            asca_sim_new(2, 2, ptr::null(), goals.as_ptr(), &params, &mut sim),
            AscaStatus::NullPointer
        );
        // Bad dimensionality.
        assert_eq!(
            asca_sim_new(4, 2, starts.as_ptr(), goals.as_ptr(), &params, &mut sim),
            AscaStatus::InvalidArgument
        );
        // Starts 1 m apart violate the activation-diameter precondition.
        assert_eq!(
            asca_sim_new(2, 2, starts.as_ptr(), goals.as_ptr(), &params, &mut sim),
            AscaStatus::InvalidScenario
        );
        // Invalid parameter set.
        let mut bad = params;
        bad.d_final = bad.d_min;
        assert_eq!(
            asca_sim_new(2, 2, starts.as_ptr(), goals.as_ptr(), &bad, &mut sim),
            AscaStatus::InvalidArgument
        );
        // Buffer too small.
        let ok_starts = [0.0f64, 0.0, 30.0, 0.0];
        assert_eq!(
            asca_sim_new(2, 2, ok_starts.as_ptr(), goals.as_ptr(), &params, &mut sim),
            AscaStatus::Ok
        );
        let mut tiny = [0.0f64; 2];
        assert_eq!(
            asca_sim_positions(sim, tiny.as_mut_ptr(), tiny.len()),
            AscaStatus::BufferTooSmall
        );
        asca_sim_free(sim);
        asca_sim_free(ptr::null_mut());

        // Status strings are static C strings.
        let text = std::ffi::CStr::from_ptr(asca_status_str(AscaStatus::InvalidScenario));
        assert_eq!(text.to_str().unwrap(), "invalid scenario");
    }
}

#[test]
fn header_declares_every_exported_function() {
    let header = include_str!("../include/asca.h");
    let source = include_str!("../src/lib.rs");
    let mut checked = 0;
    for line in source.lines() {
        let line = line.trim_start();
        let Some(rest) = line
            .strip_prefix("pub extern \"C\" fn ")
            .or_else(|| line.strip_prefix("pub unsafe extern \"C\" fn "))
        else {
            continue;
        };
        let name = rest.split('(').next().unwrap().trim();
        assert!(
            header.contains(&format!("{name}(")),
            "function {name} missing from include/asca.h"
        );
        checked += 1;
    }
    assert!(checked >= 14, "expected the full surface, found {checked}");
}
