use std::collections::HashMap;

use eventaug::*;
use proptest::prelude::*;

fn arb_stream(max_n: usize, max_dim: u16) -> impl Strategy<Value = EventStream> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(w, h)| {
        prop::collection::vec((0u64..50, 0..w, 0..h, any::<bool>()), 0..=max_n).prop_map(
            move |raw| {
                let events = raw
                    .into_iter()
                    .map(|(t, x, y, pos)| {
                        Event::new(t, x, y, if pos { Polarity::Positive } else { Polarity::Negative })
                    })
                    .collect();
                EventStream::new(w, h, events).unwrap()
            },
        )
    })
}

/// Independent counting oracle: one hash-map bucket per (slice, channel, y, x).
fn oracle_frames(stream: &EventStream, t: usize) -> HashMap<(usize, usize, usize, usize), u32> {
    let n = stream.len();
    let per = n / t;
    let mut out = HashMap::new();
    for (i, e) in stream.events().iter().enumerate() {
        if per == 0 || i >= per * t {
            continue;
        }
        let c = if e.p.as_i8() > 0 { 1 } else { 0 };
        *out.entry((i / per, c, e.y as usize, e.x as usize)).or_insert(0) += 1;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn binary_stream_round_trip(s in arb_stream(60, 300)) {
        let bytes = write_binary_stream(&s);
        prop_assert_eq!(bytes.len(), 20 + 16 * s.len());
        let back = parse_binary_stream(&bytes).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(write_binary_stream(&back), bytes);
    }

    #[test]
    fn text_stream_round_trip(s in arb_stream(60, 300)) {
        let text = write_text_stream(&s);
        let back = parse_text_stream(&text, PolarityEncoding::NegOneOne).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(write_text_stream(&back), text);
    }

    #[test]
    fn frame_round_trip(
        (t, h, w, counts) in (1usize..4, 1usize..6, 1usize..6).prop_flat_map(|(t, h, w)| {
            (Just(t), Just(h), Just(w), prop::collection::vec(any::<u32>(), t * 2 * h * w))
        })
    ) {
        let f = FrameTensor::from_counts(t, h, w, counts.into_iter().map(u64::from).collect()).unwrap();
        let bytes = write_frame_tensor(&f);
        prop_assert_eq!(bytes.len(), 22 + 4 * t * 2 * h * w);
        prop_assert_eq!(&read_frame_tensor(&bytes).unwrap(), &f);
    }

    #[test]
    fn unsorted_text_sorts_stably(s in arb_stream(40, 8), seed in any::<u64>()) {
        // shuffle deterministically, then check ties keep shuffled order
        use rand::{seq::SliceRandom, SeedableRng};
        let mut events = s.events().to_vec();
        events.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let mut text = format!("# {} {}\n", s.width(), s.height());
        for e in &events {
            text.push_str(&format!("{} {} {} {}\n", e.t, e.x, e.y, e.p.as_i8()));
        }
        let parsed = parse_text_stream(text.as_bytes(), PolarityEncoding::NegOneOne).unwrap();
        let mut expect = events.clone();
        // insertion sort is stable by construction
        for i in 1..expect.len() {
            let mut j = i;
            while j > 0 && expect[j - 1].t > expect[j].t {
                expect.swap(j - 1, j);
                j -= 1;
            }
        }
        prop_assert_eq!(parsed.events(), expect.as_slice());
    }

    #[test]
    fn integration_matches_counting_oracle(s in arb_stream(200, 12), t in 1usize..20) {
        prop_assume!(t <= s.len().max(1));
        let frames = integrate(&s, &slice_stream(&s, t).unwrap()).unwrap();
        let oracle = oracle_frames(&s, t);
        for j in 0..t {
            for c in 0..2 {
                for y in 0..frames.height() {
                    for x in 0..frames.width() {
                        let want = oracle.get(&(j, c, y, x)).copied().unwrap_or(0);
                        prop_assert_eq!(frames.get(j, c, y, x), want);
                    }
                }
            }
        }
        // remainder rule
        let per = s.len() / t;
        prop_assert_eq!(frames.total() as usize, per * t);
        for j in 0..t {
            prop_assert_eq!(frames.slice_sum(j) as usize, per);
        }
    }

    #[test]
    fn refinement_identity(s in arb_stream(240, 10), t in 1usize..6) {
        let n = s.len() - s.len() % (2 * t);
        prop_assume!(n > 0);
        let s = EventStream::new(s.width(), s.height(), s.events()[..n].to_vec()).unwrap();
        let coarse = integrate(&s, &slice_stream(&s, t).unwrap()).unwrap();
        let fine = integrate(&s, &slice_stream(&s, 2 * t).unwrap()).unwrap();
        for j in 0..t {
            let sum: Vec<u32> = fine.slice(2 * j).iter().zip(fine.slice(2 * j + 1)).map(|(a, b)| a + b).collect();
            prop_assert_eq!(coarse.slice(j), sum.as_slice());
        }
    }

    #[test]
    fn msti_base_matches_standalone(s in arb_stream(300, 8), base in 1usize..8, n in 1usize..4, m in 1usize..4) {
        prop_assume!(base >= m && n * base <= s.len());
        let v = msti_variants(&s, MstiSpec::new(base, n, m).unwrap()).unwrap();
        let standalone = integrate(&s, &slice_stream(&s, base).unwrap()).unwrap();
        prop_assert_eq!(&v.base, &standalone);
        prop_assert_eq!(v.short_term.num_slices(), n * base);
        prop_assert_eq!(v.long_term.num_slices(), base.div_ceil(m));
    }

    #[test]
    fn mask_threshold_law(densities in prop::collection::vec(0u64..20, 1..40), r in 0.0f64..=1.0) {
        let k = densities.len();
        let grid = PatchGrid::new(k as u16, 1, 1).unwrap();
        let ranking = SaliencyRanking::from_densities(densities.clone());
        let mask = ssem_mask(&grid, &ranking, r).unwrap();
        let budget = (k as f64 * r + 1e-9).floor() as usize;
        prop_assert!(mask.masked_count() <= budget);
        match mask.epsilon() {
            Some(eps) => {
                for (i, &d) in densities.iter().enumerate() {
                    prop_assert_eq!(mask.masked()[i], d > eps);
                }
            }
            None => prop_assert_eq!(mask.masked_count(), 0),
        }
    }

    #[test]
    fn mask_is_monotone_in_rate(densities in prop::collection::vec(0u64..20, 1..40), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let grid = PatchGrid::new(densities.len() as u16, 1, 1).unwrap();
        let ranking = SaliencyRanking::from_densities(densities);
        let small = ssem_mask(&grid, &ranking, lo).unwrap();
        let large = ssem_mask(&grid, &ranking, hi).unwrap();
        for (s, l) in small.masked().iter().zip(large.masked()) {
            prop_assert!(!s || *l);
        }
    }

    #[test]
    fn ranking_is_sorted_permutation(densities in prop::collection::vec(0u64..10, 0..50)) {
        let r = SaliencyRanking::from_densities(densities.clone());
        let mut seen = r.order().to_vec();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..densities.len()).collect::<Vec<_>>());
        for w in r.order().windows(2) {
            let (a, b) = (densities[w[0]], densities[w[1]]);
            prop_assert!(a > b || (a == b && w[0] < w[1]));
        }
        prop_assert_eq!(r.total(), densities.iter().sum::<u64>());
    }

    #[test]
    fn spatial_mask_commutes_and_is_idempotent(s in arb_stream(200, 20), ps in 1u16..6, r in 0.0f64..=1.0, t in 1usize..5) {
        prop_assume!(t <= s.len());
        let grid = PatchGrid::for_stream(&s, ps).unwrap();
        let ranking = spatial_saliency(&s, &grid).unwrap();
        prop_assert_eq!(ranking.total() as usize, s.len());
        let mask = ssem_mask(&grid, &ranking, r).unwrap();
        let plan = slice_stream(&s, t).unwrap();
        let frames = integrate(&s, &plan).unwrap();
        let masked_frames = apply_frame_mask(&frames, &mask).unwrap();
        prop_assert_eq!(&apply_frame_mask(&masked_frames, &mask).unwrap(), &masked_frames);

        let filtered = ssem_filter_events(&s, &mask).unwrap();
        prop_assert_eq!(&ssem_filter_events(&filtered, &mask).unwrap(), &filtered);
        prop_assert!(filtered.events().iter().all(|e| !mask.is_masked(e.x, e.y)));
        let removed = s.len() - filtered.len();
        prop_assert_eq!(removed, s.events().iter().filter(|e| mask.is_masked(e.x, e.y)).count());

        // integrate survivors under the original index-to-slice assignment
        let owner = plan.assignment(s.len());
        let mut survivors_frames = FrameTensor::zeros(t, frames.height(), frames.width()).unwrap();
        let mut expected = vec![0u64; survivors_frames.counts().len()];
        for (i, e) in s.events().iter().enumerate() {
            if let (Some(j), false) = (owner[i], mask.is_masked(e.x, e.y)) {
                expected[survivors_frames.index(j, e.p.channel(), e.y as usize, e.x as usize)] += 1;
            }
        }
        survivors_frames = FrameTensor::from_counts(t, frames.height(), frames.width(), expected).unwrap();
        prop_assert_eq!(&survivors_frames, &masked_frames);
    }

    #[test]
    fn tsem_scope_and_order(s in arb_stream(300, 6), t in 1usize..8, p in 0.0f64..=1.0, q in 0.01f64..=1.0, seed in any::<u64>()) {
        prop_assume!(t <= s.len());
        // unique timestamps so survivors can be matched back to their source index
        let unique = s.events().iter().enumerate().map(|(i, e)| Event::new(i as u64, e.x, e.y, e.p)).collect();
        let s = EventStream::new(s.width(), s.height(), unique).unwrap();
        let plan = slice_stream(&s, t).unwrap();
        let ranking = temporal_saliency(&s, &plan).unwrap();
        let dp = build_drop_plan(&ranking, p, DropScope::TopFraction(q)).unwrap();
        for &rate in dp.rates() {
            prop_assert!(rate == 0.0 || (rate >= p - 1e-15 && rate <= 1.0));
        }
        let out = tsem_filter_events(&s, &plan, &dp, seed).unwrap();
        // survivors form a subsequence; nothing out of scope or in the remainder is lost
        let owner = plan.assignment(s.len());
        let mut it = out.events().iter().peekable();
        for (i, e) in s.events().iter().enumerate() {
            let kept = it.peek() == Some(&e);
            if kept {
                it.next();
            }
            let protected = owner[i].is_none_or(|j| dp.rates()[j] == 0.0);
            prop_assert!(kept || !protected, "event {} dropped outside scope", i);
        }
        prop_assert!(it.next().is_none());
        prop_assert_eq!(&tsem_filter_events(&s, &plan, &dp, seed).unwrap(), &out);
    }

    #[test]
    fn drop_floor_law(d in prop::collection::vec(1u64..1000, 1..20), p in 0.0f64..=1.0) {
        let ranking = SaliencyRanking::from_densities(d.clone());
        let dp = build_drop_plan(&ranking, p, DropScope::AllSlices).unwrap();
        let argmin = (0..d.len()).min_by_key(|&i| d[i]).unwrap();
        prop_assert_eq!(dp.rates()[argmin], p);
        for (i, &rate) in dp.rates().iter().enumerate() {
            let raw = d[i] as f64 / dp.min_density() as f64 * p;
            prop_assert_eq!(rate, raw.min(1.0));
            prop_assert!(rate >= dp.rates()[argmin]);
        }
    }
}

#[test]
fn tsem_binomial_rate() {
    // one slice of 1000 events at p_s = 0.3, 200 seeds
    let events: Vec<Event> = (0..1000)
        .map(|i| Event::new(i, (i % 5) as u16, 0, Polarity::Positive))
        .collect();
    let s = EventStream::new(5, 1, events).unwrap();
    let plan = SlicePlan::from_boundaries(vec![(0, 1000)]).unwrap();
    let ranking = temporal_saliency(&s, &plan).unwrap();
    let dp = build_drop_plan(&ranking, 0.3, DropScope::AllSlices).unwrap();
    let seeds = 200u64;
    let total: usize = (0..seeds)
        .map(|seed| 1000 - tsem_filter_events(&s, &plan, &dp, seed).unwrap().len())
        .sum();
    let mean = total as f64 / seeds as f64;
    // standard error of the mean drop count
    let sigma = (1000.0 * 0.3 * 0.7 / seeds as f64).sqrt();
    assert!((mean - 300.0).abs() < 4.0 * sigma, "mean {mean}, sigma {sigma}");
}
