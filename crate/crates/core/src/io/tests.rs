use super::*;
use crate::expansion::FeTriple;
use crate::wigner3d::export_grid;
use crate::yields::{channel_table, load_particles, pair_yields, McConfig, SpectrumBins};
use proptest::prelude::*;

#[test]
fn p_wave_table_has_nine_rows() {
    let states: Vec<Ame> = (-1..=1).map(|m| Ame::new(0, 1, m).unwrap()).collect();
    let rows = coeff_rows(&states);
    assert_eq!(rows.len(), 9);
    let nonzero = rows
        .iter()
        .filter(|r| !r.exact_value().unwrap().is_zero())
        .count();
    assert_eq!(nonzero, 5);
    let c = rows
        .iter()
        .find(|r| r.m == 1 && (r.n1, r.n2, r.n3) == (1, 0, 0))
        .unwrap();
    assert!((c.re + 0.5f64.sqrt()).abs() < 1e-15 && c.im == 0.0);
    assert_eq!(
        c.exact_value().unwrap(),
        coeff(Ame::new(0, 1, 1).unwrap(), FeTriple::new(1, 0, 0))
    );
}

#[test]
fn ground_state_table_is_one() {
    let rows = coeff_rows(&Ame::shell(0));
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].re, rows[0].im), (1.0, 0.0));
}

#[test]
fn coeff_json_and_csv_round_trip() {
    let states: Vec<Ame> = (0..=3).flat_map(Ame::shell).collect();
    let mut rows = coeff_rows(&states);
    rows[0].oracle_re = Some(0.999_999_999_7);
    rows[0].oracle_im = Some(-1e-12);
    let text = coeff_json(&rows).unwrap();
    assert_eq!(parse_coeff_json(&text).unwrap(), rows);
    assert!(text.contains("\"exact\""));

    let plain: Vec<CoeffRow> = rows
        .iter()
        .cloned()
        .map(|mut r| {
            r.oracle_re = None;
            r.oracle_im = None;
            r
        })
        .collect();
    assert_eq!(parse_coeff_csv(&coeff_csv(&plain)).unwrap(), plain);
}

#[test]
fn coeff_json_rejects_inconsistent_rows() {
    let mut rows = coeff_rows(&Ame::shell(1));
    rows[2].re = -rows[2].re + 0.25;
    assert!(parse_coeff_json(&coeff_json(&rows).unwrap()).is_err());
    let mut rows = coeff_rows(&Ame::shell(1));
    rows[0].exact = "sqrt(2)".into();
    assert!(parse_coeff_json(&coeff_json(&rows).unwrap()).is_err());
}

fn small_grid() -> WignerGrid {
    let params = OscParams::new(1.0, 0.5, 1.0).unwrap();
    let axes = GridAxes::parse("r:0:2:5,q:0:2:4,theta:0;pi/3;pi/2").unwrap();
    export_grid(0, 1, &axes, &params).unwrap()
}

#[test]
fn grid_round_trip_is_bit_exact() {
    let g = small_grid();
    let text = grid_to_string(&g).unwrap();
    let back = parse_grid(&text).unwrap();
    assert_eq!(back, g);
    for (a, b) in g.values.iter().zip(&back.values) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
    assert_eq!(grid_to_string(&back).unwrap(), text);
    let first_row = text.lines().nth(2).unwrap();
    let w = first_row.split(',').nth(3).unwrap();
    let mantissa = w
        .split('e')
        .next()
        .unwrap()
        .trim_start_matches('-')
        .replace('.', "");
    assert_eq!(mantissa.len(), 17);
}

#[test]
fn grid_parse_errors() {
    let text = grid_to_string(&small_grid()).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.swap(3, 4);
    assert!(matches!(
        parse_grid(&lines.join("\n")),
        Err(Error::Parse { .. })
    ));
    let truncated: Vec<&str> = text.lines().take(10).collect();
    assert!(parse_grid(&truncated.join("\n")).is_err());
    assert!(parse_grid("").is_err());
    assert!(parse_grid("{not json}\nr,q,theta,W\n").is_err());
}

#[test]
fn prob_table_round_trip() {
    let params = OscParams::with_zeta(1.0, 2.0, 1.0).unwrap();
    let t = prob_table(
        &[(0, 0), (0, 3), (1, 1)],
        &[0.0, 1.0],
        &[0.5, 1.0],
        &[0.0, 0.7],
        &params,
    );
    assert_eq!(t.rows.len(), 24);
    let text = prob_csv(&t).unwrap();
    assert!(text.lines().next().unwrap().contains("\"zeta\":2.0"));
    assert_eq!(parse_prob_csv(&text).unwrap(), t);

    assert_eq!(parse_prob_json(&prob_json(&t).unwrap()).unwrap(), t);

    let head = text.lines().next().unwrap();
    let cut = head.rfind("\"zeta\":2.0").unwrap();
    let bad = format!("{}\"zeta\":3.0{}", &text[..cut], &text[cut + 10..]);
    assert!(parse_prob_csv(&bad).is_err());
}

#[test]
fn particles_params_and_reports_round_trip() {
    let recs = vec![
        ParticleRecord::new("u", [0.1, -0.2, 1.0 / 3.0], [0.0, 1e-300, -2.5]).with_weight(0.75),
        ParticleRecord::new("dbar", [1.0, 2.0, 3.0], [-1.0, -2.0, -3.0]),
    ];
    assert_eq!(
        load_particles(particles_csv(&recs).as_bytes()).unwrap(),
        recs
    );

    let p = ParticleParams {
        nu: 0.8,
        delta: 0.3,
        hbar: 0.197_326_98,
        zeta_override: Some(0.25),
    };
    assert_eq!(parse_params_json(&params_json(&p).unwrap()).unwrap(), p);
    assert!(parse_params_json(r#"{"nu":-1,"delta":0.5}"#).is_err());

    let (a, b) = (&recs[..1], &recs[1..]);
    let mut mc = McConfig::new(7, 10);
    mc.spectrum = Some(SpectrumBins::uniform(-1.0, 1.0, 2).unwrap());
    let params = OscParams::default();
    let rep = pair_yields(a, b, &channel_table(), &params, &mc).unwrap();
    let text = yield_report_json(&rep).unwrap();
    assert!(text.contains("\"yield\""));
    assert_eq!(parse_yield_report(&text).unwrap(), rep);
}

proptest! {
    #[test]
    fn prob_rows_round_trip(vals in proptest::collection::vec(
        (0u32..4, 0u32..7, -1e6f64..1e6, -1e6f64..1e6, 0.0f64..3.2, 0.0f64..1e12, 0.0f64..1e12, 0.0f64..1.0), 0..20),
        zeta in 0.01f64..100.0)
    {
        let params = OscParams::with_zeta(1.3, zeta, 0.7).unwrap();
        let rows = vals.into_iter().map(|(k, l, r, p, theta, v, t, prob)| ProbRow { k, l, r, p, theta, v, t, prob }).collect();
        let t = ProbTable { params, rows };
        prop_assert_eq!(parse_prob_csv(&prob_csv(&t).unwrap()).unwrap(), t);
    }

    #[test]
    fn fmt17_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        prop_assert_eq!(fmt17(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}
