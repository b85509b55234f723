use std::time::Instant;

use occupancy_core::construct::*;
use occupancy_core::diag::*;
use occupancy_core::eval::*;
use occupancy_core::family::*;
use occupancy_core::grid::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("all");

    if which == "derived" || which == "all" {
        // DERIVED: N=4, S = {(0,0),(1,2),(2,1),(3,3)}
        let s = GridSet::new(4, [(0, 0), (1, 2), (2, 1), (3, 3)]).unwrap();
        let exact = max_tube_occupancy_exact(&s).unwrap();
        let sampled = max_occupancy_sampled(&s, 1_000_000, 12345).unwrap();
        println!("n4 special set: exact={} sampled(1e6)={}", exact.max_count, sampled.max_count);

        // DERIVED: C(T_4) by brute force over 1820 subsets
        let fam = tube_family_exact(4).unwrap();
        println!("tube_family_exact(4): {} members", fam.len());
        let t = Instant::now();
        let (c4, opt) = minimax_occupancy_bruteforce(&fam, 10_000_000).unwrap();
        println!("C(T_4) = {c4}, optimal = {opt:?}  ({:?})", t.elapsed());
        let a = GridSet::from_ids(4, opt.iter().copied()).unwrap();
        println!("optimal cells: {:?}", a.cells().collect::<Vec<_>>());
        let ea = max_tube_occupancy_exact(&a).unwrap().max_count;
        let aa = self_similar_compose(&a, &a).unwrap();
        let eaa = max_tube_occupancy_exact(&aa).unwrap().max_count;
        println!("occ(A)={ea} occ(AA)={eaa} (bound {})", ea * ea);

        // greedy cover sizes to pin
        for (n, k, l) in [(6usize, 3usize, 2usize), (8, 4, 2), (10, 5, 2), (12, 4, 3)] {
            let g = greedy_cover(n, k, l, 10_000_000).unwrap();
            println!("greedy_cover({n},{k},{l}) size = {}", g.k_sets.len());
        }

        // sampled diagonal n=8 pin
        let diag8 = GridSet::new(8, (0..8).map(|i| (i, i))).unwrap();
        let r = max_occupancy_sampled(&diag8, 10_000, 1).unwrap();
        println!("sampled diag8 seed1 lines1e4 = {}", r.max_count);

        // interval: golden n=64 c=2
        let p = quadratic_irrational_perm(64, GOLDEN_RATIO).unwrap();
        let r = interval_occupancy(&p, 2.0).unwrap();
        println!("interval golden n64 c2 = {}", r.max_count);
        let setg = permutation_set(&p);
        let e = max_tube_occupancy_exact(&setg).unwrap();
        println!("exact golden n64 = {}", e.max_count);

        // dirichlet pins
        for n in [16u32, 64, 256, 1024, 4096] {
            let w = dirichlet_collinear_witness(n, GOLDEN_RATIO).unwrap();
            let bound = ((n as f64).sqrt() / 4.0).ceil() as usize;
            println!("dirichlet golden n={n}: p={} pts={} occ={} (bound {bound})", w.p, w.points.len(), w.occupancy);
        }

        // energy diag n=16
        let d16 = GridSet::new(16, (0..16).map(|i| (i, i))).unwrap();
        println!("energy diag16 = {:.12}", energy(&d16).unwrap());
    }

    if which == "crit2" || which == "all" {
        let t = Instant::now();
        let mut total_lines = 0usize;
        for n in 2..=256u32 {
            let s = permutation_set(&PermutationSpec::identity(n));
            let lines = critical_lines(&s).unwrap();
            total_lines += lines.len();
            let rep = max_tube_occupancy_exact(&s).unwrap();
            assert_eq!(rep.max_count, n as usize, "identity at n={n}");
        }
        println!("criterion2 full sweep: {:?} ({total_lines} lines total)", t.elapsed());
    }

    if which == "crit7" || which == "all" {
        let t = Instant::now();
        let fam = tube_family(256).unwrap();
        println!("tube_family(256): {} members in {:?}", fam.len(), t.elapsed());
        let sizes: Vec<usize> = fam.members().iter().map(|m| m.len()).collect();
        let avg: f64 = sizes.iter().sum::<usize>() as f64 / sizes.len() as f64;
        let max = sizes.iter().max().unwrap();
        println!("member sizes: avg {avg:.1}, max {max}");
        let t = Instant::now();
        let mut passes = 0;
        let mut worst = 0usize;
        for seed in 0..100u64 {
            let r = random_select_verify(&fam, 3.0, seed).unwrap();
            if r.pass {
                passes += 1;
            }
            worst = worst.max(r.max_intersection);
            if seed == 0 {
                println!("threshold = {:.3}, s = {:.3}", r.threshold, r.s_exponent);
            }
        }
        println!("crit7: {passes}/100 pass, worst intersection {worst} ({:?})", t.elapsed());
    }

    if which == "crit5" || which == "all" {
        let t = Instant::now();
        let p10 = quadratic_irrational_perm(1 << 10, GOLDEN_RATIO).unwrap();
        let p14 = quadratic_irrational_perm(1 << 14, GOLDEN_RATIO).unwrap();
        let s10 = slope_class_sums(&p10).max_sum;
        let s14 = slope_class_sums(&p14).max_sum;
        println!("golden max sums: 2^10 {s10:.4}, 2^14 {s14:.4}, ratio {:.4} ({:?})", s14 / s10, t.elapsed());
        let i10 = slope_class_sums(&PermutationSpec::identity(1 << 10)).max_sum;
        let i14 = slope_class_sums(&PermutationSpec::identity(1 << 14)).max_sum;
        println!("identity max sums: 2^10 {i10:.4}, 2^14 {i14:.4}, ratio {:.4}", i14 / i10);
    }

    if which == "crit1" || which == "all" {
        let t = Instant::now();
        for n in [4u32, 8, 16] {
            for seed in 0..10u64 {
                let s = random_set(n, seed);
                let e = max_tube_occupancy_exact(&s).unwrap();
                let smp = max_occupancy_sampled(&s, 100_000, seed ^ 0xdead).unwrap();
                assert!(smp.max_count <= e.max_count);
            }
        }
        println!("crit1 sample (30 sets x 1e5 lines): {:?}", t.elapsed());
    }

    if which == "crit3" || which == "all" {
        let t = Instant::now();
        for n in [1024u32, 4096] {
            let p = quadratic_irrational_perm(n, GOLDEN_RATIO).unwrap();
            let s = permutation_set(&p);
            let r = max_occupancy_sampled(&s, 20_000, 7).unwrap();
            println!("sampled golden n={n}: {} ({:?})", r.max_count, t.elapsed());
        }
    }
}
