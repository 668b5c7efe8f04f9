use graykeep::baselines::{decode_scheme, run_scheme, RunParams};
use graykeep::payload::{random_bits, XorShift64Star};
use graykeep::{to_gray, BitBuf, ColorImage, Error, Header, SchemeId, Thresholds};
use proptest::prelude::*;

fn textured(w: usize, h: usize, seed: u64, noise: u64) -> ColorImage {
    let mut rng = XorShift64Star::new(seed);
    let base = [60 + (seed % 90) as i64, 80 + (seed % 50) as i64, 50 + (seed % 110) as i64];
    ColorImage::from_fn(w, h, |i, j| {
        std::array::from_fn(|c| {
            let jitter = if noise == 0 { 0 } else { (rng.next_u64() % (2 * noise + 1)) as i64 - noise as i64 };
            (base[c] + (i as i64) / 2 - (j as i64) / 3 + jitter).clamp(0, 255) as u8
        })
    })
}

fn assert_invariant(cover: &ColorImage, marked: &ColorImage, header_pixels: usize) {
    let (a, b) = (to_gray(cover), to_gray(marked));
    for i in 0..cover.height() {
        for j in 0..cover.width() {
            if i > 0 || j >= header_pixels {
                assert_eq!(a.get(i, j), b.get(i, j), "gray changed at ({i}, {j})");
            }
        }
    }
}

fn scheme_strategy() -> impl Strategy<Value = SchemeId> {
    prop::sample::select(SchemeId::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fixed_threshold_round_trip(
        scheme in scheme_strategy(),
        w in 32usize..56,
        h in 12usize..40,
        seed in any::<u64>(),
        noise in 0u64..12,
        len in 0usize..400,
        t1 in 0u8..40,
        dt in 0u8..200,
    ) {
        let cover = textured(w, h, seed, noise);
        let secret = random_bits(len, seed ^ 0xabcd);
        let th = Thresholds::new(t1, t1.saturating_add(dt)).unwrap();
        match run_scheme(scheme, &cover, &secret, RunParams::Fixed(th)) {
            Ok((marked, report)) => {
                assert_invariant(&cover, &marked, report.header_pixels);
                let (c, s) = decode_scheme(scheme, &marked).unwrap();
                prop_assert_eq!(c, cover);
                prop_assert_eq!(s, secret);
            }
            Err(Error::CapacityExceeded { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn auto_threshold_round_trip(
        scheme in scheme_strategy(),
        seed in any::<u64>(),
        noise in 0u64..6,
        len in 0usize..300,
    ) {
        let cover = textured(48, 48, seed, noise);
        let secret = random_bits(len, seed.rotate_left(7));
        let (marked, report) = run_scheme(scheme, &cover, &secret, RunParams::Auto).unwrap();
        prop_assert_eq!(report.capacity_bits, len);
        assert_invariant(&cover, &marked, report.header_pixels);
        let (c, s) = decode_scheme(scheme, &marked).unwrap();
        prop_assert_eq!(c, cover);
        prop_assert_eq!(s, secret);
    }

    #[test]
    fn arbitrary_marked_input_never_panics(scheme in scheme_strategy(), seed in any::<u64>(), noise in 0u64..64) {
        let img = textured(40, 24, seed, noise);
        let _ = decode_scheme(scheme, &img);
    }
}

#[test]
fn empty_secret_only_touches_header() {
    let cover = textured(64, 64, 7, 3);
    for scheme in SchemeId::ALL {
        let (marked, report) = run_scheme(scheme, &cover, &BitBuf::new(), RunParams::Auto).unwrap();
        assert_eq!(report.header_pixels, Header::pixel_count(Header::total_bits(64, 64).unwrap()));
        assert_invariant(&cover, &marked, report.header_pixels);
        let (c, s) = decode_scheme(scheme, &marked).unwrap();
        assert_eq!(c, cover);
        assert!(s.is_empty());
    }
}

#[test]
fn saturated_image_refuses_payload() {
    let cover = ColorImage::from_fn(48, 48, |_, _| [255, 255, 255]);
    for scheme in SchemeId::ALL {
        let err = run_scheme(scheme, &cover, &random_bits(64, 1), RunParams::Auto).unwrap_err();
        assert!(matches!(err, Error::CapacityExceeded { .. }), "{scheme}: {err}");
    }
}

#[test]
fn too_narrow_image_is_rejected() {
    let cover = textured(16, 16, 3, 2);
    let err = run_scheme(SchemeId::Proposed, &cover, &random_bits(8, 1), RunParams::Auto).unwrap_err();
    assert!(matches!(err, Error::HeaderTooLarge { .. }), "{err}");
}

#[test]
fn tampered_image_does_not_decode_to_cover() {
    let cover = textured(64, 64, 11, 4);
    let secret = random_bits(500, 2);
    let (mut marked, _) = graykeep::encode(&cover, &secret, 0, 16).unwrap();
    let v = marked.pixel(30, 30);
    marked.set_pixel(30, 30, [v[0] ^ 4, v[1], v[2]]);
    if let Ok((c, s)) = graykeep::decode(&marked) {
        assert!(c != cover || s != secret);
    }
}

#[test]
fn decoding_with_wrong_scheme_does_not_panic() {
    let cover = textured(64, 64, 5, 3);
    let secret = random_bits(300, 9);
    let (marked, _) = run_scheme(SchemeId::Proposed, &cover, &secret, RunParams::Auto).unwrap();
    if let Ok((c, s)) = decode_scheme(SchemeId::Hou, &marked) {
        assert!(c != cover || s != secret);
    }
}

#[test]
fn encoding_is_deterministic() {
    let cover = textured(64, 48, 21, 5);
    let secret = random_bits(700, 4);
    for scheme in SchemeId::ALL {
        let (a, ra) = run_scheme(scheme, &cover, &secret, RunParams::Auto).unwrap();
        let (b, rb) = run_scheme(scheme, &cover, &secret, RunParams::Auto).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra.thresholds, rb.thresholds);
    }
}

#[test]
fn unmarked_image_fails_cleanly() {
    let cover = textured(64, 64, 13, 20);
    for scheme in SchemeId::ALL {
        let _ = decode_scheme(scheme, &cover);
    }
}
