use algnet::bits::Bitstring;
use algnet::machine::builtins::succ_time_overhead;
use algnet::machine::{enumerate_bb, oracle, Labels, Program};
use algnet::network::{run_networked, sample_population, NetworkAssembly, Selector};
use algnet::tvg::{gen_small_diameter, temporal_diffusion_diameter, Family};
use proptest::prelude::*;

fn labels() -> Labels {
    Labels {
        halting: "1011".parse().unwrap(),
        non_halting: "0100".parse().unwrap(),
    }
}

fn program(s: &str) -> Bitstring {
    s.parse().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn maximum_reaches_every_node_within_diameter(
        family_idx in 0usize..3,
        n in 2usize..40,
        seed in 0u64..1000,
        c_0 in 0usize..3,
    ) {
        let family = Family::ALL[family_idx];
        let g = gen_small_diameter(family, n, seed).unwrap();
        let d = temporal_diffusion_diameter(&g, 0).unwrap().unwrap();
        let programs = sample_population(n, seed, 48);
        let assembly = NetworkAssembly::identity(g, programs, c_0).unwrap();
        let w = program("1");
        let sel = Selector::PHalt { labels: labels() };
        let rec = run_networked(&assembly, &w, &sel.head(), 5_000).unwrap();
        let settled = &rec.carried[c_0 + d];
        prop_assert!(settled.iter().all(|&v| v == rec.x_max));
        // maxima never decrease from cycle to cycle
        for pair in rec.cycle_maxima.windows(2) {
            prop_assert!(pair[0] <= pair[1]);
        }
    }

    #[test]
    fn placement_does_not_change_the_population_maximum(n in 2usize..24, seed in 0u64..1000, rot in 1usize..24) {
        let g = gen_small_diameter(Family::ReplicatedHypercube, n, seed).unwrap();
        let programs = sample_population(n, seed, 48);
        let w = program("1");
        let head = Selector::Identity.head();
        let a = run_networked(&NetworkAssembly::identity(g.clone(), programs.clone(), 0).unwrap(), &w, &head, 5_000).unwrap();
        let b_j: Vec<usize> = (0..n).map(|v| (v + rot) % n).collect();
        let shifted = NetworkAssembly::new(g, programs, b_j, 0, None).unwrap();
        let b = run_networked(&shifted, &w, &head, 5_000).unwrap();
        prop_assert_eq!(a.x_max, b.x_max);
        prop_assert_eq!(a.final_outputs(), b.final_outputs());
    }
}

#[test]
fn runs_are_reproducible_from_the_seed() {
    let g = gen_small_diameter(Family::ReplicatedRandomRegular, 32, 11).unwrap();
    let w = program("010001");
    let head = Selector::PHalt { labels: labels() }.head();
    let run = || {
        let programs = sample_population(32, 11, 64);
        run_networked(
            &NetworkAssembly::identity(g.clone(), programs, 1).unwrap(),
            &w,
            &head,
            10_000,
        )
        .unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn networks_above_the_busy_beaver_bound_decide_correctly() {
    let table = enumerate_bb(8 + succ_time_overhead(), 20_000);
    let sel = Selector::PHalt { labels: labels() };
    let mut checked = 0;
    for w in algnet::machine::codewords(8) {
        let truth = oracle(&w, &Bitstring::empty(), 1_000_000).unwrap();
        let expected = labels().label(truth.halted()).clone();
        let bound = table.exact(w.len() + succ_time_overhead()).unwrap();
        for seed in 0..4 {
            let n = 24;
            let g = gen_small_diameter(Family::StarBroadcast, n, seed).unwrap();
            let programs = sample_population(n, seed, 64);
            let assembly = NetworkAssembly::identity(g, programs, 0).unwrap();
            let rec = run_networked(&assembly, w.encoding(), &sel.head(), 20_000).unwrap();
            if rec.x_max >= bound {
                checked += 1;
                for out in rec.final_outputs() {
                    assert_eq!(out.as_ref(), Some(&expected), "w = {w:?}");
                }
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn looping_input_gets_the_non_halting_label_everywhere() {
    // INC R0; JMPBACK 1
    let grow = Program::register(&[
        algnet::machine::Instruction::Inc { reg: 0 },
        algnet::machine::Instruction::JmpBack { back: 1 },
    ])
    .unwrap();
    let g = gen_small_diameter(Family::ReplicatedHypercube, 16, 2).unwrap();
    let programs = sample_population(16, 2, 64);
    let assembly = NetworkAssembly::identity(g, programs, 0).unwrap();
    let sel = Selector::PHalt { labels: labels() };
    let mut rec = run_networked(&assembly, grow.encoding(), &sel.head(), 10_000).unwrap();
    rec.score(&labels().non_halting);
    assert!(rec.all_correct());
}

#[test]
fn larger_populations_extend_smaller_ones() {
    let small = sample_population(16, 9, 64);
    let large = sample_population(64, 9, 64);
    assert_eq!(&large[..16], &small[..]);
}
