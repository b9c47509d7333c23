use super::*;
use crate::coalescence::p_kl;
use num_traits::One;
use proptest::prelude::*;
use rand::Rng;

fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn zeta1() -> OscParams {
    OscParams::with_zeta(1.0, 1.0, 1.0).unwrap()
}

fn box_particles(tag: &str, n: usize, seed: u64, weighted: bool) -> Vec<ParticleRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut v = || rng.gen_range(-1.5..1.5);
            let rec = ParticleRecord::new(tag, [v(), v(), v()], [v(), v(), v()]);
            if weighted {
                let w = rng.gen_range(0.5..2.0);
                rec.with_weight(w)
            } else {
                rec
            }
        })
        .collect()
}

#[test]
fn table_has_eight_channels_with_listed_weights() {
    let t = channel_table();
    let names: Vec<&str> = t.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "pi+",
            "rho+",
            "b1+",
            "a0+",
            "a1+",
            "a2+",
            "pi(1300)+",
            "rho(1450)+"
        ]
    );
    let w = |n: &str| t.iter().find(|c| c.name == n).unwrap().stat_weight.clone();
    assert_eq!(w("pi+"), q(1, 36));
    assert_eq!(w("rho+"), q(3, 36));
    assert_eq!(w("b1+"), q(1, 36));
    assert_eq!(w("a0+"), q(1, 108));
    assert_eq!(w("a1+"), q(1, 36));
    assert_eq!(w("a2+"), q(5, 108));
    assert_eq!(w("pi(1300)+"), q(1, 36));
    assert_eq!(w("rho(1450)+"), q(3, 36));
    assert_eq!(w("a0+") + w("a1+") + w("a2+"), q(1, 12));
    for c in &t {
        assert!(c.stat_weight > q(0, 1) && c.stat_weight <= BigRational::one());
    }
}

#[test]
fn rational_gcd_gives_integer_multiples() {
    let ws = [q(1, 36), q(1, 108), q(1, 36), q(5, 108)];
    let u = rational_gcd(ws.iter());
    assert_eq!(u, q(1, 108));
    for w in &ws {
        assert!((w / &u).is_integer());
    }
}

#[test]
fn load_empty_and_two_rows() {
    assert!(load_particles("".as_bytes()).unwrap().is_empty());
    let src = "species,rx,ry,rz,px,py,pz\nu,0,0,0,0.1,0,0\ndbar,1,0,0,-0.1,0,0\n";
    let recs = load_particles(src.as_bytes()).unwrap();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0].species, "u");
    assert_eq!(recs[1].r, [1.0, 0.0, 0.0]);
    assert_eq!(recs[1].weight, 1.0);
    let parts = partition(recs);
    assert_eq!(parts["u"].len(), 1);
    assert_eq!(parts["dbar"].len(), 1);
}

#[test]
fn load_weight_column() {
    let src = "species,rx,ry,rz,px,py,pz,weight\nu,0,0,0,0,0,0,0.25\n";
    let recs = load_particles(src.as_bytes()).unwrap();
    assert_eq!(recs[0].weight, 0.25);
}

#[test]
fn load_rejects_nan_at_its_line() {
    let src = "species,rx,ry,rz,px,py,pz\nu,0,0,0,0,0,0\ndbar,NaN,0,0,0,0,0\n";
    match load_particles(src.as_bytes()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn load_errors() {
    let unknown = "species,rx,ry,rz,px,py,pz\nc,0,0,0,0,0,0\n";
    let msg = load_particles(unknown.as_bytes()).unwrap_err().to_string();
    for tag in KNOWN_SPECIES {
        assert!(msg.contains(tag), "{msg}");
    }
    assert!(matches!(
        load_particles("species,x,y\nu,0,0\n".as_bytes()),
        Err(Error::Parse { line: 1, .. })
    ));
    assert!(matches!(
        load_particles("species,rx,ry,rz,px,py,pz\nu,0,0,0,0,0\n".as_bytes()),
        Err(Error::Parse { line: 2, .. })
    ));
    assert!(matches!(
        load_particles("species,rx,ry,rz,px,py,pz,weight\nu,0,0,0,0,0,0,-1\n".as_bytes()),
        Err(Error::Parse { line: 2, .. })
    ));
    assert!(matches!(
        load_particles("species,rx,ry,rz,px,py,pz\nu,0,0,zero,0,0,0\n".as_bytes()),
        Err(Error::Parse { line: 2, .. })
    ));
}

#[test]
fn params_sidecar() {
    let p: ParticleParams = serde_json::from_str(r#"{"nu":1.0,"delta":0.5,"hbar":1.0}"#).unwrap();
    assert_eq!(p.osc_params().unwrap().zeta(), 1.0);
    let p: ParticleParams =
        serde_json::from_str(r#"{"nu":2.0,"delta":0.5,"zeta_override":4.0}"#).unwrap();
    let o = p.osc_params().unwrap();
    assert_eq!(o.hbar(), 1.0);
    assert!((o.zeta() - 4.0).abs() < 1e-14);
    assert!(serde_json::from_str::<ParticleParams>(r#"{"nu":1.0}"#).is_err());
}

#[test]
fn single_pair_at_origin() {
    let a = [ParticleRecord::new("u", [0.0; 3], [0.0; 3])];
    let b = [ParticleRecord::new("dbar", [0.0; 3], [0.0; 3])];
    let rep = pair_yields(&a, &b, &channel_table(), &zeta1(), &McConfig::new(1, 10)).unwrap();
    assert!((rep.get("pi+").unwrap().yield_ - 1.0 / 36.0).abs() < 1e-15);
    assert!((rep.get("rho+").unwrap().yield_ - 3.0 / 36.0).abs() < 1e-15);
    for n in ["b1+", "a0+", "a1+", "a2+", "pi(1300)+", "rho(1450)+"] {
        assert!(rep.get(n).unwrap().yield_.abs() < 1e-15, "{n}");
    }
    assert_eq!(rep.mc.pairs, 1);
    assert!(rep.channels.iter().all(|c| c.stderr == 0.0));
}

#[test]
fn full_pairing_matches_direct_sum() {
    let a = box_particles("u", 7, 1, true);
    let b = box_particles("dbar", 5, 2, true);
    let params = OscParams::new(1.0, 0.7, 1.0).unwrap();
    let rep = pair_yields(&a, &b, &channel_table(), &params, &McConfig::new(0, 1)).unwrap();
    assert_eq!(rep.mc.pairs, 35);
    for c in channel_table() {
        let mut direct = 0.0;
        for x in &a {
            for y in &b {
                let s = PairSample::from_records(x, y);
                direct += s.weight * p_kl(c.k, c.l, &s.rel, &params);
            }
        }
        direct *= c.stat_weight.to_f64().unwrap();
        let got = rep.get(&c.name).unwrap().yield_;
        assert!(
            (got - direct).abs() <= 1e-13 * direct.abs().max(1e-300),
            "{}: {got} vs {direct}",
            c.name
        );
        assert!(got >= 0.0);
    }
}

#[test]
fn spin_partners_are_exact_multiples() {
    let a = box_particles("u", 100, 3, true);
    let b = box_particles("dbar", 100, 4, true);
    let rep = pair_yields(&a, &b, &channel_table(), &zeta1(), &McConfig::new(9, 100)).unwrap();
    assert_eq!(rep.mc.pairs, 10_000);
    let y = |n: &str| rep.get(n).unwrap().yield_;
    assert!(y("pi+") > 0.0);
    assert_eq!(y("rho+"), 3.0 * y("pi+"));
    assert_eq!(y("rho(1450)+"), 3.0 * y("pi(1300)+"));
    assert_eq!(y("a1+"), 3.0 * y("a0+"));
    assert_eq!(y("b1+"), y("a1+"));
}

#[test]
fn sampled_mode_is_deterministic() {
    let a = box_particles("u", 1001, 5, false);
    let b = box_particles("dbar", 1000, 6, false);
    let mut mc = McConfig::new(42, 3000);
    mc.spectrum = Some(SpectrumBins::uniform(-3.0, 3.0, 4).unwrap());
    let params = zeta1();
    let r1 = pair_yields(&a, &b, &channel_table(), &params, &mc).unwrap();
    let r2 = pair_yields(&a, &b, &channel_table(), &params, &mc).unwrap();
    assert_eq!(r1.mc.pairs, 3000);
    assert_eq!(
        serde_json::to_string(&r1).unwrap(),
        serde_json::to_string(&r2).unwrap()
    );
    for (x, y) in r1.channels.iter().zip(&r2.channels) {
        assert_eq!(x.yield_.to_bits(), y.yield_.to_bits());
        assert_eq!(x.stderr.to_bits(), y.stderr.to_bits());
    }
    assert!(r1.channels.iter().all(|c| c.stderr > 0.0));

    mc.seed = 43;
    let r3 = pair_yields(&a, &b, &channel_table(), &params, &mc).unwrap();
    assert_ne!(r1.get("pi+").unwrap().yield_, r3.get("pi+").unwrap().yield_);
    // Different seeds agree within a few standard errors.
    let (y1, y3) = (r1.get("pi+").unwrap(), r3.get("pi+").unwrap());
    assert!((y1.yield_ - y3.yield_).abs() < 6.0 * (y1.stderr.hypot(y3.stderr)));
}

#[test]
fn sampled_mode_estimates_full_sum() {
    // 1001 x 1000 exceeds the full-pairing limit; the exact sum is known
    // from a smaller full run over the same per-pair function.
    let a = box_particles("u", 1001, 7, false);
    let b = box_particles("dbar", 1000, 8, false);
    let chans = &channel_table()[..1];
    let params = zeta1();
    let est = pair_yields(&a, &b, chans, &params, &McConfig::new(1, 20_000)).unwrap();
    let exact: f64 = a
        .par_iter()
        .map(|x| {
            b.iter()
                .map(|y| p_kl(0, 0, &PairSample::from_records(x, y).rel, &params))
                .sum::<f64>()
        })
        .sum::<f64>()
        / 36.0;
    let e = &est.channels[0];
    assert!(
        (e.yield_ - exact).abs() < 5.0 * e.stderr,
        "{} vs {exact} ± {}",
        e.yield_,
        e.stderr
    );
}

#[test]
fn doubling_weights_doubles_yields_exactly() {
    let a = box_particles("u", 30, 9, true);
    let b = box_particles("dbar", 40, 10, true);
    let params = zeta1();
    let mc = McConfig::new(0, 1);
    let base = pair_yields(&a, &b, &channel_table(), &params, &mc).unwrap();
    let a2: Vec<_> = a
        .iter()
        .cloned()
        .map(|r| {
            let w = r.weight;
            r.with_weight(2.0 * w)
        })
        .collect();
    let b2: Vec<_> = b
        .iter()
        .cloned()
        .map(|r| {
            let w = r.weight;
            r.with_weight(2.0 * w)
        })
        .collect();
    let one = pair_yields(&a2, &b, &channel_table(), &params, &mc).unwrap();
    let both = pair_yields(&a2, &b2, &channel_table(), &params, &mc).unwrap();
    for ((x, y), z) in base.channels.iter().zip(&one.channels).zip(&both.channels) {
        assert_eq!(y.yield_, 2.0 * x.yield_);
        assert_eq!(z.yield_, 4.0 * x.yield_);
    }
}

#[test]
fn pair_yield_errors() {
    let a = box_particles("u", 2, 1, false);
    let b = box_particles("dbar", 2, 2, false);
    let t = channel_table();
    let p = zeta1();
    assert!(pair_yields(&a, &b, &t, &p, &McConfig::new(0, 0)).is_err());
    assert!(pair_yields(&a, &a, &t, &p, &McConfig::new(0, 5)).is_err());
    assert!(pair_yields(&[], &b, &t, &p, &McConfig::new(0, 5)).is_err());
    let mut mixed = b.clone();
    mixed.push(ParticleRecord::new("u", [0.0; 3], [0.0; 3]));
    assert!(pair_yields(&a, &mixed, &t, &p, &McConfig::new(0, 5)).is_err());
}

#[test]
fn shells_of_a_single_pair_are_bounded() {
    let params = OscParams::new(1.3, 0.4, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let mut v = || rng.gen_range(-2.0..2.0);
        let rel = RelPhasePoint::new([v(), v(), v()], [v(), v(), v()]);
        let mut total = 0.0;
        for n in 0..=6u32 {
            for l in (n % 2..=n).step_by(2) {
                total += p_kl((n - l) / 2, l, &rel, &params);
            }
        }
        assert!(total <= 1.0 + 1e-12, "{total}");
    }
}

fn origin_pair(p_total: [f64; 3], weight: f64) -> PairSample {
    PairSample {
        rel: RelPhasePoint::new([0.0; 3], [0.0; 3]),
        p_total,
        weight,
    }
}

#[test]
fn delta_mode_fills_one_bin() {
    let bins = SpectrumBins::uniform(-2.0, 2.0, 4).unwrap();
    let pi = &channel_table()[0];
    let s = spectrum(
        &bins,
        &[origin_pair([0.3, -1.2, 1.9], 1.0)],
        pi,
        &zeta1(),
        SpectrumMode::Delta,
    )
    .unwrap();
    let hit = bins.index(2, 0, 3);
    for (i, v) in s.values.iter().enumerate() {
        if i == hit {
            assert!((v - 1.0 / 36.0).abs() < 1e-15);
        } else {
            assert_eq!(*v, 0.0);
        }
    }
    // outside the range nothing is deposited
    let s = spectrum(
        &bins,
        &[origin_pair([2.5, 0.0, 0.0], 1.0)],
        pi,
        &zeta1(),
        SpectrumMode::Delta,
    )
    .unwrap();
    assert!(s.values.iter().all(|&v| v == 0.0));
}

#[test]
fn smeared_profile_is_gaussian() {
    let params = OscParams::new(1.0, 0.5, 1.0).unwrap();
    let sigma = params.hbar() / (2f64.sqrt() * params.delta());
    let fine: Vec<f64> = (0..=200)
        .map(|i| -3.0 * sigma + 0.03 * sigma * i as f64)
        .collect();
    let wide = vec![-10.0 * sigma, 10.0 * sigma];
    let bins = SpectrumBins::new([fine.clone(), wide.clone(), wide]).unwrap();
    let pi = &channel_table()[0];
    let s = spectrum(
        &bins,
        &[origin_pair([0.0; 3], 1.0)],
        pi,
        &params,
        SpectrumMode::Smeared,
    )
    .unwrap();
    let centre = |i: usize| 0.5 * (fine[i] + fine[i + 1]);
    let peak = s.values[99].max(s.values[100]);
    let i0 = if s.values[99] > s.values[100] {
        99
    } else {
        100
    };
    for i in [20, 60, 130, 180] {
        let expect = (-(centre(i).powi(2) - centre(i0).powi(2)) / (2.0 * sigma * sigma)).exp();
        assert!((s.values[i] / peak - expect).abs() < 1e-3, "bin {i}");
    }
    // the 1/e point of J sits at √2 σ = ħ/δ from P_i
    let at = |x: f64| s.values[((x + 3.0 * sigma) / (0.03 * sigma)) as usize];
    let ratio = at(2f64.sqrt() * sigma) / peak;
    assert!((ratio - (-1f64).exp()).abs() < 0.03, "{ratio}");
}

#[test]
fn smeared_spectrum_integrates_to_yield() {
    let params = OscParams::new(1.0, 0.6, 1.0).unwrap();
    let sigma = params.hbar() / (2f64.sqrt() * params.delta());
    let a = box_particles("u", 20, 12, true);
    let b = box_particles("dbar", 20, 13, true);
    let reach = 6.0 + 6.0 * sigma;
    let mut mc = McConfig::new(0, 1);
    mc.spectrum = Some(SpectrumBins::uniform(-reach, reach, 12).unwrap());
    mc.spectrum_mode = SpectrumMode::Smeared;
    let rep = pair_yields(&a, &b, &channel_table(), &params, &mc).unwrap();
    for (c, s) in rep.channels.iter().zip(rep.spectra.as_ref().unwrap()) {
        assert_eq!(c.name, s.channel);
        if c.yield_ > 1e-12 {
            assert!((s.integral() / c.yield_ - 1.0).abs() < 1e-3, "{}", c.name);
        }
    }
    mc.spectrum_mode = SpectrumMode::Delta;
    let rep = pair_yields(&a, &b, &channel_table(), &params, &mc).unwrap();
    for (c, s) in rep.channels.iter().zip(rep.spectra.as_ref().unwrap()) {
        assert!(
            (s.integral() - c.yield_).abs() <= 1e-12 * c.yield_.max(1e-300),
            "{}",
            c.name
        );
    }
}

#[test]
fn identical_pairs_double_the_spectrum() {
    let bins = SpectrumBins::uniform(-4.0, 4.0, 5).unwrap();
    let rho = &channel_table()[1];
    let params = zeta1();
    let s = PairSample {
        rel: RelPhasePoint::new([0.2, 0.1, -0.3], [0.4, 0.0, 0.1]),
        p_total: [0.5, 0.1, -0.7],
        weight: 1.0,
    };
    for mode in [SpectrumMode::Delta, SpectrumMode::Smeared] {
        let one = spectrum(&bins, &[s], rho, &params, mode).unwrap();
        let two = spectrum(&bins, &[s, s], rho, &params, mode).unwrap();
        for (x, y) in one.values.iter().zip(&two.values) {
            assert_eq!(*y, 2.0 * x);
        }
    }
}

#[test]
fn misordered_edges_are_rejected() {
    let ok = vec![0.0, 1.0];
    assert!(SpectrumBins::new([vec![0.0, 2.0, 1.0], ok.clone(), ok.clone()]).is_err());
    assert!(SpectrumBins::new([vec![0.0, 0.0], ok.clone(), ok.clone()]).is_err());
    assert!(SpectrumBins::new([vec![0.0], ok.clone(), ok.clone()]).is_err());
    let bad = SpectrumBins {
        edges: [vec![1.0, 0.0], ok.clone(), ok],
    };
    let pi = &channel_table()[0];
    assert!(spectrum(&bad, &[], pi, &zeta1(), SpectrumMode::Delta).is_err());
    let empty = spectrum(
        &SpectrumBins::uniform(0.0, 1.0, 2).unwrap(),
        &[],
        pi,
        &zeta1(),
        SpectrumMode::Delta,
    )
    .unwrap();
    assert!(empty.values.iter().all(|&v| v == 0.0));
}

#[test]
fn pairwise_sum_is_accurate() {
    let xs: Vec<f64> = (0..100_000).map(|i| 0.1 + (i % 7) as f64 * 1e-3).collect();
    let naive: f64 = xs.iter().sum();
    let exact: f64 = (0..7)
        .map(|j| (0.1 + j as f64 * 1e-3) * (100_000 / 7 + usize::from(j < 100_000 % 7)) as f64)
        .sum();
    assert!((pairwise_sum(&xs) - exact).abs() <= (naive - exact).abs().max(1e-9));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn yields_are_nonnegative_and_ratios_hold(seed in 0u64..1000, n in 1usize..12, m in 1usize..12) {
        let a = box_particles("u", n, seed, true);
        let b = box_particles("dbar", m, seed + 1, true);
        let rep = pair_yields(&a, &b, &channel_table(), &zeta1(), &McConfig::new(seed, 1)).unwrap();
        let y = |n: &str| rep.get(n).unwrap().yield_;
        prop_assert!(rep.channels.iter().all(|c| c.yield_ >= 0.0));
        prop_assert_eq!(y("rho+"), 3.0 * y("pi+"));
        prop_assert_eq!(y("rho(1450)+"), 3.0 * y("pi(1300)+"));
    }

    #[test]
    fn particle_csv_round_trips(seed in 0u64..1000, n in 0usize..6) {
        let recs = box_particles("ubar", n, seed, true);
        let mut text = String::from("species,rx,ry,rz,px,py,pz,weight\n");
        for r in &recs {
            text += &format!("{},{:?},{:?},{:?},{:?},{:?},{:?},{:?}\n", r.species, r.r[0], r.r[1], r.r[2], r.p[0], r.p[1], r.p[2], r.weight);
        }
        prop_assert_eq!(load_particles(text.as_bytes()).unwrap(), recs);
    }
}
