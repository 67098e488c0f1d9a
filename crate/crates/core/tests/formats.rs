mod common;

use common::{ctw_record, icdar_record};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slpr_core::dataio::{
    format_annotation, parse_annotation, parse_ctw1500, parse_icdar15, read_annotations,
    read_detections, write_detections, Format,
};
use slpr_core::{Detection, Error};

proptest! {
    #[test]
    fn icdar_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rec = icdar_record(&mut rng);
        let line = format_annotation(&rec, Format::Icdar15).unwrap();
        let back = parse_annotation(&line, Format::Icdar15).unwrap();
        prop_assert_eq!(&back, &rec);
        prop_assert_eq!(format_annotation(&back, Format::Icdar15).unwrap(), line);
    }

    #[test]
    fn ctw_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rec = ctw_record(&mut rng);
        let line = format_annotation(&rec, Format::Ctw1500).unwrap();
        prop_assert_eq!(line.split(',').count(), 32);
        let back = parse_annotation(&line, Format::Ctw1500).unwrap();
        prop_assert_eq!(&back, &rec);
        prop_assert_eq!(format_annotation(&back, Format::Ctw1500).unwrap(), line);
    }

    #[test]
    fn json_round_trip_keeps_full_precision(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rec = ctw_record(&mut rng);
        rec.polygon = rec.polygon.translated(0.1234567890123, 1e-7);
        let line = format_annotation(&rec, Format::PolygonJson).unwrap();
        prop_assert_eq!(parse_annotation(&line, Format::PolygonJson).unwrap(), rec);
    }

    #[test]
    fn parsers_never_panic(line in ".{0,200}") {
        let _ = parse_icdar15(&line);
        let _ = parse_ctw1500(&line);
        let _ = read_detections(&line);
    }
}

#[test]
fn malformed_lines_are_parse_errors() {
    let icdar = [
        "",
        "1,2,3",
        "1,2,3,4,5,6,7",
        "a,0,10,0,10,10,0,10,text",
        "0,0,10,0,10,10,0,,text",
        "0,0,10,0,10,10,0,NaN,text",
        "0,0,10,0,10,10,0,inf",
        "0;0;10;0;10;10;0;10",
    ];
    for line in icdar {
        assert!(
            matches!(parse_icdar15(line), Err(Error::Parse(_))),
            "{line:?}"
        );
    }
    let ctw = [
        "",
        "0,0,10,4",
        "0,0,10,4,0,0,2,0,4,0,6,0,8,0,9,0,10,0,10,4,8,4,6,4,4,4,2,4,1,4,0",
        "0,0,10,4,0,0,2,0,4,0,6,0,8,0,9,0,10,0,10,4,8,4,6,4,4,4,2,4,1,4,0,4,7",
        "0,0,10,4,0,0,2,0,4,0,6,0,8,0,9,0,10,0,10,4,8,4,6,4,4,4,2,4,1,4,x,4",
        "0 0 10 4 0 0 2 0 4 0 6 0 8 0 9 0 10 0 10 4 8 4 6 4 4 4 2 4 1 4 0 4",
    ];
    for line in ctw {
        assert!(
            matches!(parse_ctw1500(line), Err(Error::Parse(_))),
            "{line:?}"
        );
    }
    assert!(matches!(
        read_annotations("0,0,10,0,10,10,0,10\nbad\n", Format::Icdar15),
        Err(Error::Parse(_))
    ));
}

#[test]
fn degenerate_geometry_is_rejected() {
    assert!(matches!(
        parse_icdar15("0,0,10,0,20,0,30,0"),
        Err(Error::DegeneratePolygon(_))
    ));
    assert!(matches!(
        parse_icdar15("0,0,0,0,10,10,0,10"),
        Err(Error::DegeneratePolygon(_))
    ));
}

#[test]
fn icdar_tolerates_bom_and_crlf() {
    let text = "\u{feff}377,117,463,117,465,130,378,130,Genaxis Theatre\r\n374,155,409,155,409,170,374,170,###\r\n";
    let recs = read_annotations(text, Format::Icdar15).unwrap();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0].transcription.as_deref(), Some("Genaxis Theatre"));
    assert!(!recs[0].dont_care);
    assert!(recs[1].dont_care);
}

#[test]
fn detections_round_trip_in_every_format() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let quads: Vec<Detection> = (0..20)
        .map(|i| Detection::new(icdar_record(&mut rng).polygon, 0.5 + i as f64 / 100.0, i).unwrap())
        .collect();
    let bands: Vec<Detection> = (0..20)
        .map(|i| Detection::new(ctw_record(&mut rng).polygon, 1.0, i).unwrap())
        .collect();

    let back = read_detections(&write_detections(&quads, Format::Icdar15).unwrap()).unwrap();
    assert_eq!(back, quads);
    let back = read_detections(&write_detections(&bands, Format::Ctw1500).unwrap()).unwrap();
    assert_eq!(back, bands);
    let back = read_detections(&write_detections(&bands, Format::PolygonJson).unwrap()).unwrap();
    assert_eq!(back, bands);
    assert!(matches!(
        write_detections(&bands, Format::Icdar15),
        Err(Error::Format(_))
    ));
}
