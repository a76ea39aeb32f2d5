use proptest::prelude::*;

use ranksig_core::ingest::{read_records, write_records, Counting, InstitutionRecord};

fn record(idx: usize) -> impl Strategy<Value = InstitutionRecord> {
    (
        "[A-Za-z][A-Za-z ,'\"-]{0,16}[a-z]",
        "[A-Z]{2}",
        prop_oneof![Just("2015-2018"), Just("2006-2009"), Just("2011-2014")],
        prop_oneof![Just("All sciences"), Just("Physical sciences and engineering")],
        prop_oneof![Just(Counting::Fractional), Just(Counting::Full)],
        1.0..60_000.0f64,
        0.0..1.0f64,
        proptest::option::of((0.0..1.0f64, 0.0..1.0f64)),
    )
        .prop_map(move |(name, country, period, field, counting, p, share, ci)| {
            let p = (p * 100.0).round() / 100.0;
            let t = (p * share * 10.0).round() / 10.0;
            let pp = t / p;
            let mut rec = InstitutionRecord::from_counts(format!("{idx}-{name}"), p, t);
            rec.country = country;
            rec.period = period.to_string();
            rec.field = field.to_string();
            rec.counting = counting;
            rec.pp_top10 = pp;
            if let Some((a, b)) = ci {
                rec = rec.with_interval(pp * a, pp + (1.0 - pp) * b);
            }
            rec
        })
}

fn records() -> impl Strategy<Value = Vec<InstitutionRecord>> {
    (1usize..12).prop_flat_map(|n| (0..n).map(record).collect::<Vec<_>>())
}

fn render(records: &[InstitutionRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_records(records, &mut buf).unwrap();
    buf
}

proptest! {
    #[test]
    fn write_then_read_round_trips(recs in records()) {
        let back = read_records(render(&recs).as_slice()).unwrap();
        prop_assert_eq!(back.len(), recs.len());
        for (a, b) in recs.iter().zip(&back) {
            prop_assert_eq!(&a.name, &b.name);
            prop_assert_eq!(&a.country, &b.country);
            prop_assert_eq!(&a.period, &b.period);
            prop_assert_eq!(&a.field, &b.field);
            prop_assert_eq!(a.counting, b.counting);
            prop_assert!((a.p - b.p).abs() <= 1e-9);
            prop_assert!((a.t_top10 - b.t_top10).abs() <= 1e-9);
            prop_assert!((a.pp_top10 - b.pp_top10).abs() <= 1e-9);
            prop_assert_eq!(a.ci_lower.is_some(), b.ci_lower.is_some());
            prop_assert!((a.ci_lower.unwrap_or(0.0) - b.ci_lower.unwrap_or(0.0)).abs() <= 1e-9);
            prop_assert!((a.ci_upper.unwrap_or(0.0) - b.ci_upper.unwrap_or(0.0)).abs() <= 1e-9);
        }
    }

    #[test]
    fn duplicates_keep_first_occurrence(recs in records(), pick in any::<prop::sample::Index>()) {
        let mut doubled = recs.clone();
        doubled.push(pick.get(&recs).clone());
        let back = read_records(render(&doubled).as_slice()).unwrap();
        prop_assert_eq!(back.len(), recs.len());
        for (a, b) in recs.iter().zip(&back) {
            prop_assert_eq!(&a.name, &b.name);
        }
    }

    #[test]
    fn parsed_records_satisfy_invariants(recs in records()) {
        for r in read_records(render(&recs).as_slice()).unwrap() {
            prop_assert!(r.validate(true).is_ok());
        }
    }

    #[test]
    fn corrupted_rows_always_raise(rec in record(0), which in 0usize..10, noise in 1.0..1e6f64) {
        let p = rec.p;
        let row = |cells: [String; 10]| format!("{}\n{}\n", ranksig_core::ingest::RECORD_HEADER.join(","), cells.join(","));
        let mut cells = [
            "X".to_string(), "CN".into(), "2015-2018".into(), "All sciences".into(), "frac".into(),
            p.to_string(), rec.t_top10.to_string(), rec.pp_top10.to_string(), String::new(), String::new(),
        ];
        match which {
            0 => cells[0] = String::new(),
            1 => cells[4] = "half".into(),
            2 => cells[5] = format!("-{noise}"),
            3 => cells[5] = "many".into(),
            4 => cells[6] = (p + noise).to_string(),
            5 => cells[7] = (1.0 + noise).to_string(),
            6 => { cells[8] = "0.0".into(); }
            7 => { cells[8] = (rec.pp_top10 + noise).to_string(); cells[9] = (rec.pp_top10 + 2.0 * noise).to_string(); }
            8 => { cells[6] = String::new(); cells[7] = String::new(); }
            _ => cells[6] = (rec.pp_top10 * p + 1.0 + 0.01 * p + noise).min(p + noise).to_string(),
        }
        let text = row(cells);
        prop_assert!(read_records(text.as_bytes()).is_err(), "accepted {}", text);
    }
}
