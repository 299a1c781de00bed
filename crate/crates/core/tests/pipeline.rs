//! Cross-module checks: realizations feed schemes, schemes feed the
//! information measures, and serialized realizations reproduce results.

use num_rational::Rational64;
use sdof_core::analysis::{
    fit_dof_slope, interference_scheme_sdof, power_grid, sdof_formula, SchemeInformation,
    SchemeRef, SdofQuery,
};
use sdof_core::channel::{sample_channel, ChannelModel, ChannelRealization, GainDistribution};
use sdof_core::converse::{deterministic_outputs, discretize_codeword};
use sdof_core::monomial_alignment::{
    build_partial_csit_fixed, receive_noiseless, encode_pam, NearestPointDecoder, PamScheme,
    DEFAULT_DECODE_BUDGET,
};
use sdof_core::precoding::{
    build_asymptotic_precoders, build_helper_fading, precoder_dimension,
    verify_alignment_equations, PrecoderOptions,
};

fn slopes(info: &SchemeInformation) -> (f64, f64) {
    let grid = power_grid(5, 8);
    let values: Vec<_> = grid.iter().map(|&p| info.at(p, 1.0).unwrap()).collect();
    let legit: Vec<f64> = values.iter().map(|v| v.legit_nats[0]).collect();
    let leak: Vec<f64> = values.iter().map(|v| v.leak_nats).collect();
    (
        fit_dof_slope(&grid, &legit).unwrap().slope,
        fit_dof_slope(&grid, &leak).unwrap().slope,
    )
}

#[test]
fn serialized_realization_reproduces_helper_information() {
    let model = ChannelModel::Helper { helpers: 2 };
    let r = sample_channel(model, GainDistribution::default(), 3, false, 21).unwrap();
    let text = serde_json::to_string(&r.to_document()).unwrap();
    let back = ChannelRealization::from_document(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(r, back);

    let a = build_helper_fading(2, &r, 5).unwrap();
    let b = build_helper_fading(2, &back, 5).unwrap();
    let ia = SchemeInformation::of(SchemeRef::Helper(&a)).unwrap();
    let ib = SchemeInformation::of(SchemeRef::Helper(&b)).unwrap();
    assert_eq!(ia.at(1e6, 1.0).unwrap(), ib.at(1e6, 1.0).unwrap());

    let (legit, leak) = slopes(&ia);
    assert!((legit - 2.0).abs() < 0.05, "{legit}");
    assert!(leak.abs() < 0.05, "{leak}");
    assert_eq!(
        Rational64::new(2, 3),
        sdof_formula(SdofQuery::Helper { helpers: 2 }).unwrap()
    );
}

#[test]
fn interference_precoders_verify_and_count() {
    let slots = precoder_dimension(3, 1).unwrap() as usize;
    let model = ChannelModel::Interference { users: 3 };
    let r = sample_channel(model, GainDistribution::default(), slots, false, 8).unwrap();
    let set = build_asymptotic_precoders(3, 1, &r, 9, &PrecoderOptions::default()).unwrap();
    let report = verify_alignment_equations(&set, 1e-10).unwrap();
    assert!(report.passed());
    assert_eq!((report.generator_passed, report.generator_total), (16, 16));
    let ranks = set.rank_report(1e-10).unwrap();
    assert!(ranks.passed);
    let desired = ranks.lambda_ranks[0] - ranks.interference_ranks[0];
    assert_eq!(
        Rational64::new((3 * desired) as i64, ranks.m_n as i64),
        interference_scheme_sdof(3, 1).unwrap()
    );
    let info = SchemeInformation::of(SchemeRef::Precoders(&set)).unwrap();
    let (_, leak) = slopes(&info);
    assert!(leak.abs() < 0.05, "{leak}");
}

#[test]
fn partial_csit_fixed_scheme_decodes_noiselessly() {
    let model = ChannelModel::MacPartial { users: 3, informed: 2 };
    let r = sample_channel(model, GainDistribution::default(), 1, true, 4).unwrap();
    let scheme = PamScheme::with_power(build_partial_csit_fixed(3, 2, &r).unwrap(), 1e6, 0.05).unwrap();
    let decoder = NearestPointDecoder::new(&scheme, DEFAULT_DECODE_BUDGET).unwrap();
    let q = scheme.params.q as i64;
    let streams = scheme.layout.streams.len();
    for shift in 0..5 {
        let symbols: Vec<i64> = (0..streams as i64).map(|i| (i * 7 + shift) % (2 * q + 1) - q).collect();
        let y = receive_noiseless(&scheme, &encode_pam(&scheme, &symbols).unwrap()).unwrap();
        assert_eq!(decoder.decode(y), decoder.aggregate(&symbols));
    }
}

#[test]
fn deterministic_channel_on_sampled_gains() {
    let model = ChannelModel::Mac { users: 2 };
    let r = sample_channel(model, GainDistribution::default(), 4, false, 13).unwrap();
    let x1 = discretize_codeword(&[0.5, 1.5, 2.5, 3.5], 64.0).unwrap();
    let x2 = discretize_codeword(&[7.0, 6.0, 5.0, 4.0], 64.0).unwrap();
    let out = deterministic_outputs(&[x1.clone(), x2.clone()], &r).unwrap();
    for t in 0..4 {
        let y = (r.h1(1, t) * x1.values[t] as f64).floor() as i64
            + (r.h1(2, t) * x2.values[t] as f64).floor() as i64;
        assert_eq!(out.y[0][t], y);
        let z = (r.g(1, t) * x1.values[t] as f64).floor() as i64
            + (r.g(2, t) * x2.values[t] as f64).floor() as i64;
        assert_eq!(out.z[t], z);
    }
}
