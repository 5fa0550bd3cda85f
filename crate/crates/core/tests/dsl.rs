use pathsim_core::dsl::{
    compile, parse, print_canonical, ExperimentAst, GeometryEvent, ModelStmt, SourceText, SweepStmt, MODEL_PARAMS,
};
use pathsim_core::scenario::SweepAxis;
use pathsim_core::{Angle, Stage};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn angle() -> impl Strategy<Value = Angle> {
    prop_oneof![
        (-1000i64..1000, 1i64..100).prop_map(|(n, d)| Angle::pi_fraction(n, d)),
        any::<f64>()
            .prop_filter("finite", |x| x.is_finite())
            .prop_map(Angle::radians),
        (-10.0f64..10.0).prop_map(Angle::radians),
    ]
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        -100.0f64..100.0,
        (-100i32..100).prop_map(f64::from),
    ]
}

fn stage() -> impl Strategy<Value = Stage> {
    prop_oneof![Just(Stage::One), Just(Stage::Three)]
}

fn axis() -> impl Strategy<Value = SweepAxis> {
    prop_oneof![Just(SweepAxis::Phi1), Just(SweepAxis::Phi3)]
}

fn model() -> impl Strategy<Value = ModelStmt> {
    (0..MODEL_PARAMS.len()).prop_flat_map(|i| {
        let (name, keys) = MODEL_PARAMS[i];
        (
            subsequence(keys.to_vec(), 0..=keys.len()).prop_shuffle(),
            prop::collection::vec(angle(), keys.len()),
        )
            .prop_map(move |(keys, values)| ModelStmt {
                name: name.to_string(),
                params: keys.into_iter().map(String::from).zip(values).collect(),
            })
    })
}

fn geometry() -> impl Strategy<Value = Vec<GeometryEvent>> {
    let labels = vec!["L@BS1", "R@BS1'", "R@BS3'", "mirror_2", "x"];
    subsequence(labels, 0..=5).prop_flat_map(|labels| {
        let n = labels.len();
        prop::collection::vec((finite(), finite()), n).prop_map(move |coords| {
            labels
                .iter()
                .zip(coords)
                .map(|(l, (t, x))| GeometryEvent {
                    label: l.to_string(),
                    t,
                    x,
                })
                .collect()
        })
    })
}

fn ast() -> impl Strategy<Value = ExperimentAst> {
    (
        (
            prop::option::of(angle()),
            prop::option::of(angle()),
            prop::option::of(stage()),
            prop::option::of(stage()),
        ),
        (
            prop::option::of(Just("paper-default".to_string())),
            geometry(),
            prop::option::of(model()),
            prop::option::of(
                (axis(), angle(), angle(), 1u32..=u32::MAX).prop_map(|(axis, from, to, steps)| SweepStmt {
                    axis,
                    from,
                    to,
                    steps,
                }),
            ),
        ),
        (prop::option::of(any::<u64>()), prop::option::of(any::<u64>())),
    )
        .prop_map(
            |((phi1, phi3, detect_l, detect_r), (geometry_preset, geometry, model, sweep), (seed, samples))| {
                ExperimentAst {
                    phi1,
                    phi3,
                    detect_l,
                    detect_r,
                    geometry_preset,
                    geometry,
                    model,
                    sweep,
                    seed,
                    samples,
                }
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_parse_round_trip(ast in ast()) {
        let text = print_canonical(&ast);
        let parsed = parse(&SourceText::new("gen.exp", text.clone()));
        prop_assert!(parsed.is_ok(), "{text}\n{:?}", parsed);
        let parsed = parsed.unwrap();
        prop_assert_eq!(&parsed, &ast);
        prop_assert_eq!(print_canonical(&parsed), text);
    }

    #[test]
    fn error_positions_point_into_source(
        lines in prop::collection::vec(
            prop_oneof![
                Just("phase phi1 = pi/2".to_string()),
                Just("detect R 3".to_string()),
                Just("samples 10".to_string()),
                "[a-z]{1,8}( +[a-z0-9=.'/-]{1,6}){0,4}",
                "(phase|detect|sweep|model|seed|geometry)( +[a-zA-Z0-9=./@']{1,5}){0,5}",
            ],
            1..8,
        ),
        indent in 0usize..4,
    ) {
        let text: String = lines.iter().map(|l| format!("{}{l}\n", " ".repeat(indent))).collect();
        if let Err(errors) = parse(&SourceText::new("f.exp", text.clone())) {
            prop_assert!(!errors.is_empty());
            let source_lines: Vec<&str> = text.split('\n').collect();
            for e in &errors {
                let line = source_lines[e.line - 1];
                let at: String = line.chars().skip(e.column - 1).take(e.token.chars().count()).collect();
                prop_assert_eq!(&at, &e.token, "{}", e);
                let prefix = format!("f.exp:{}:{}:", e.line, e.column);
                prop_assert!(e.to_string().starts_with(&prefix));
            }
        }
    }
}

#[test]
fn every_error_is_reported() {
    let text = "phase phi2 = 1\ndetect L 2\nsweep phi1 0 1x 3\nbogus\nseed -1\n";
    let errors = parse(&SourceText::new("bad.exp", text)).unwrap_err();
    let spots: Vec<(usize, usize)> = errors.iter().map(|e| (e.line, e.column)).collect();
    assert_eq!(spots, vec![(1, 7), (2, 10), (3, 14), (4, 1), (5, 6)]);
    assert!(errors[2].message.starts_with("malformed number"));
    assert!(errors[1].message.contains("stage must be 1 or 3"));
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let a = parse(&SourceText::new(
        "a",
        "# header\n\n  phase phi1 = pi/2   # trailing\r\n",
    ))
    .unwrap();
    assert_eq!(a.phi1, Some(Angle::pi_fraction(1, 2)));
    assert_eq!(print_canonical(&a), "phase phi1 = pi/2\n");
}

#[test]
fn generated_ast_compiles_when_geometry_is_complete() {
    let text = "phase phi1 = 0.25\ndetect L 1\ndetect R 3\nmodel weighted w1=2 w3=0.5\nsweep phi3 -pi pi 8\n";
    let c = compile(&parse(&SourceText::new("a", text)).unwrap()).unwrap();
    assert_eq!(c.run.sweep.unwrap().grid.len(), 8);
}
