use consfree::corpus;
use consfree::tm::{
    tm_run, tm_step, validate_tm, Configuration, Direction, Outcome, TmError, TuringMachine,
};
use proptest::prelude::*;

fn parity() -> TuringMachine {
    TuringMachine::parse(corpus::PARITY_TM).unwrap()
}

fn without(tm: &TuringMachine, state: &str, read: &str) -> TuringMachine {
    let mut tm = tm.clone();
    tm.transitions
        .retain(|t| !(t.state == state && t.read == read));
    tm
}

#[test]
fn corpus_machines_validate() {
    for (name, src) in corpus::TM_SOURCES {
        let tm = TuringMachine::parse(src).unwrap();
        let report = validate_tm(&tm);
        assert!(report.is_ok(), "{name}: {report}");
        assert_eq!(tm.blank, "B");
    }
}

#[test]
fn totality_and_determinism_violations() {
    let tm = parity();
    let r = validate_tm(&without(&tm, "start", "B"));
    assert_eq!(r.errors, vec!["no transition for state start reading B"]);

    let mut dup = tm.clone();
    let mut extra = dup.transition("start", "0").unwrap().clone();
    extra.next = "even".into();
    dup.transitions.push(extra);
    let r = validate_tm(&dup);
    assert_eq!(r.errors, vec!["2 transitions for state start reading 0"]);
}

#[test]
fn alphabet_checks() {
    let mut tm = parity();
    tm.input.push("B".into());
    assert!(validate_tm(&tm)
        .errors
        .iter()
        .any(|e| e == "blank B is an input symbol"));

    let src = "alphabet 1, B; input 1; states start, accept, reject;\nstart B -> B R accept\nstart 1 -> 1 R accept\n";
    let tm = TuringMachine::parse(src).unwrap();
    assert_eq!(validate_tm(&tm).errors, vec!["input alphabet lacks 0"]);

    let src = "alphabet 0, 1, B; input 0, 1; states start, accept;";
    let tm = TuringMachine::parse(src).unwrap();
    assert!(validate_tm(&tm)
        .errors
        .contains(&"missing state reject".to_string()));
}

#[test]
fn left_moves_from_position_zero_are_rejected() {
    let src = "alphabet 0, 1, B; input 0, 1; states start, back, accept, reject;
        start B -> B R back
        start 0 -> 0 R reject
        start 1 -> 1 R reject
        back 0 -> 0 L back
        back 1 -> 1 L back
        back B -> B L accept";
    let tm = TuringMachine::parse(src).unwrap();
    let r = validate_tm(&tm);
    assert_eq!(
        r.errors,
        vec!["back B -> B L accept: may move left from position 0"]
    );
    assert_eq!(
        tm_run(&tm, "1", 10),
        Err(TmError::LeftUnderflow("back".into()))
    );

    // A left-end marker written at position 0 makes the same walk safe.
    let src = "alphabet 0, 1, B, M; input 0, 1; blank B; states start, back, accept, reject;
        start B -> M R back
        start 0 -> 0 R reject
        start 1 -> 1 R reject
        start M -> M R reject
        back 0 -> 0 L back
        back 1 -> 1 L back
        back B -> B L back
        back M -> M R accept";
    let tm = TuringMachine::parse(src).unwrap();
    assert!(validate_tm(&tm).is_ok(), "{}", validate_tm(&tm));
    assert_eq!(tm_run(&tm, "01", 20).unwrap().outcome, Outcome::Accept);
}

#[test]
fn parse_errors_carry_lines() {
    let e = TuringMachine::parse("alphabet 0, 1, B;\n\nstart B -> B X even").unwrap_err();
    assert_eq!(e.line, 3);
    let e = TuringMachine::parse("alphabet 0, 1, B;\nstates start;").unwrap_err();
    assert!(e.msg.contains("input"), "{e}");
    let e = TuringMachine::parse("alphabet 0, 1, B, C; input 0, 1; states start;").unwrap_err();
    assert!(e.msg.contains("blank"), "{e}");
    let tm =
        TuringMachine::parse("alphabet 0, 1, B, C; input 0, 1; states start; blank C;").unwrap();
    assert_eq!(tm.blank, "C");
}

#[test]
fn printing_round_trips() {
    for (_, src) in corpus::TM_SOURCES {
        let tm = TuringMachine::parse(src).unwrap();
        assert_eq!(TuringMachine::parse(&tm.to_string()).unwrap(), tm);
    }
}

#[test]
fn single_steps() {
    let tm = parity();
    let c = Configuration::initial(&tm, "1").unwrap();
    assert_eq!((c.head, c.state.as_str(), c.read(&tm)), (0, "start", "B"));
    let c = tm_step(&tm, &c).unwrap();
    assert_eq!((c.head, c.state.as_str(), c.read(&tm)), (1, "even", "1"));
    assert_eq!(c.tape.get(&1).map(String::as_str), Some("1"));

    // Write happens at the old head position before the move.
    let src = "alphabet 0, 1, B; input 0, 1; states start, s, accept, reject;
        start B -> B R s
        start 0 -> 0 R reject
        start 1 -> 1 R reject
        s 0 -> 1 L accept
        s 1 -> 0 L accept
        s B -> B R reject";
    let tm = TuringMachine::parse(src).unwrap();
    let c = tm_step(&tm, &Configuration::initial(&tm, "0").unwrap()).unwrap();
    let c = tm_step(&tm, &c).unwrap();
    assert_eq!((c.head, c.state.as_str()), (0, "accept"));
    assert_eq!(c.tape.get(&1).map(String::as_str), Some("1"));
    assert_eq!(tm_step(&tm, &c), Err(TmError::Halted("accept".into())));
}

#[test]
fn parity_runs() {
    let tm = parity();
    assert_eq!(tm_run(&tm, "11", 100).unwrap().outcome, Outcome::Accept);
    let run = tm_run(&tm, "1", 100).unwrap();
    assert_eq!((run.outcome, run.steps), (Outcome::Reject, 3));
    assert_eq!(tm_run(&tm, "11", 0).unwrap().outcome, Outcome::Timeout);
    assert_eq!(tm_run(&tm, "2", 5), Err(TmError::UnknownInput('2')));
}

#[test]
fn missing_transition_gets_stuck() {
    let tm = without(&parity(), "odd", "B");
    assert_eq!(
        tm_run(&tm, "1", 10),
        Err(TmError::Stuck {
            state: "odd".into(),
            read: "B".into()
        })
    );
}

fn word() -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('0'), Just('1')], 1..12)
        .prop_map(|v| v.into_iter().collect())
}

proptest! {
    #[test]
    fn corpus_machines_decide_their_languages(w in word()) {
        let parity = parity();
        let has_zero = TuringMachine::parse(corpus::HAS_ZERO_TM).unwrap();
        let even = w.chars().filter(|&c| c == '1').count() % 2 == 0;
        let expect = |b| if b { Outcome::Accept } else { Outcome::Reject };
        prop_assert_eq!(tm_run(&parity, &w, 100).unwrap().outcome, expect(even));
        prop_assert_eq!(tm_run(&has_zero, &w, 100).unwrap().outcome, expect(w.contains('0')));
    }

    #[test]
    fn validated_machines_never_get_stuck(w in word(), fuel in 0usize..20, seed in any::<u64>()) {
        // Random total machine that only moves right, so it validates.
        let tm = {
            let mut rng = seed;
            let mut next = |n: u64| { rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (rng >> 33) % n };
            let states = ["start", "p", "q", "accept", "reject"];
            let syms = ["0", "1", "B"];
            let mut src = String::from("alphabet 0, 1, B; input 0, 1; states start, p, q, accept, reject;\n");
            for s in &states[..3] {
                for r in syms {
                    src += &format!("{s} {r} -> {} R {}\n", syms[next(3) as usize], states[next(5) as usize]);
                }
            }
            TuringMachine::parse(&src).unwrap()
        };
        prop_assert!(validate_tm(&tm).is_ok());
        let run = tm_run(&tm, &w, fuel).unwrap();
        prop_assert!(run.steps <= fuel);
        prop_assert!(run.last.tape.values().all(|s| s != "B"));
        prop_assert!(tm.transitions.iter().all(|t| t.dir == Direction::R));
    }
}
