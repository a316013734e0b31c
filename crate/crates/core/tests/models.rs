use workbench_core::flowltl::{check_text, parse_formula, replay, CheckOptions, Verdict};
use workbench_core::game::{parse_game, solve, GameOptions, SynthesisVerdict};
use workbench_core::models::{self, ALARM_APN};
use workbench_core::Control;

#[test]
fn sdn_reaches_egress() {
    let tn = models::sdn();
    let r = check_text(&tn, models::SDN_REACHES_EGRESS, &CheckOptions::default(), &Control::new()).unwrap();
    println!("{:?}", r.stats);
    assert_eq!(r.verdict, Verdict::Satisfied);
}

#[test]
fn sdn_guarded_route() {
    let tn = models::sdn();
    let r = check_text(&tn, models::SDN_UPDATE_GUARD, &CheckOptions::default(), &Control::new()).unwrap();
    println!("{:?}", r.stats);
    println!("{}", serde_json::to_string_pretty(&r.to_json(&tn)).unwrap());
    assert_eq!(r.verdict, Verdict::Unsatisfied);
    let phi = parse_formula(models::SDN_UPDATE_GUARD).unwrap();
    replay(&tn, &phi, r.counterexample.as_ref().unwrap()).unwrap();
}

#[test]
fn alarm_realizable() {
    let pg = parse_game(ALARM_APN).unwrap();
    let r = solve(&pg, &GameOptions::default(), &Control::new()).unwrap();
    println!("{:?}", r.stats);
    assert_eq!(r.verdict, SynthesisVerdict::Realizable);
    let sn = r.strategy_net.as_ref().unwrap();
    println!("{}", workbench_core::net::render(&sn.net, &vec![vec![]; sn.net.transition_count()]));
    sn.verify(&pg, 100_000).unwrap();
    assert!(!sn.per_state);
}
