mod common;

use common::oracle;

#[test]
fn bmo_matches_brute_force() {
    oracle::check_bmo().unwrap();
}

#[test]
fn bmo_half_step_and_stride_match_brute_force() {
    oracle::check_bmo_variants().unwrap();
}

#[test]
fn b_matches_brute_force() {
    oracle::check_b().unwrap();
}

#[test]
fn lp_ul_matches_brute_force() {
    oracle::check_lp_ul().unwrap();
}

#[test]
fn miyachi_matches_brute_force() {
    oracle::check_miyachi().unwrap();
}
