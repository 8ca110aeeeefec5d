use std::fs;

use proptest::prelude::*;

use ils_summ::features::encode_ppm;
use ils_summ::{build_instance, compute_histogram, Error, FrameImage, HistogramConfig, MetricKind};

fn solid(w: u32, h: u32, px: [u8; 3]) -> FrameImage {
    FrameImage::new(w, h, vec![px; (w * h) as usize]).unwrap()
}

fn write_frames(dir: &std::path::Path) {
    fs::write(dir.join("a.ppm"), encode_ppm(&solid(4, 3, [10, 20, 30]))).unwrap();
    fs::write(dir.join("b.ppm"), encode_ppm(&solid(2, 2, [200, 100, 0]))).unwrap();
    fs::write(dir.join("c.ppm"), encode_ppm(&solid(5, 1, [255, 255, 255]))).unwrap();
}

#[test]
fn builds_instance_from_manifest() {
    let dir = tempfile::tempdir().unwrap();
    write_frames(dir.path());
    let manifest = dir.path().join("clip.csv");
    fs::write(&manifest, "frame_filename,duration_seconds\na.ppm,2\nb.ppm,3\nc.ppm,2\n").unwrap();
    let inst = build_instance(dir.path(), &manifest, 5.0, &HistogramConfig::default(), MetricKind::Euclidean)
        .unwrap();
    assert_eq!((inst.len(), inst.dim()), (3, 96));
    assert_eq!(inst.name(), "clip");
    assert_eq!(inst.shots()[1].id, "b");
    assert_eq!(inst.shots()[1].duration_s, 3.0);
    assert_eq!(
        inst.shots()[0].features,
        compute_histogram(&solid(4, 3, [10, 20, 30]), &HistogramConfig::default()).unwrap()
    );

    let cfg16 = HistogramConfig {
        bins_per_channel: 16,
        normalize: true,
    };
    assert_eq!(build_instance(dir.path(), &manifest, 5.0, &cfg16, MetricKind::Euclidean).unwrap().dim(), 48);
}

#[test]
fn manifest_errors() {
    let dir = tempfile::tempdir().unwrap();
    write_frames(dir.path());
    let cfg = HistogramConfig::default();

    let missing = dir.path().join("missing.csv");
    fs::write(&missing, "a.ppm,2\nnope.ppm,1\n").unwrap();
    assert!(matches!(
        build_instance(dir.path(), &missing, 5.0, &cfg, MetricKind::Euclidean),
        Err(Error::MissingFrame(_))
    ));

    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    assert!(matches!(
        build_instance(dir.path(), &empty, 5.0, &cfg, MetricKind::Euclidean),
        Err(Error::EmptyInstance)
    ));

    fs::write(dir.path().join("junk.ppm"), b"P6\n2 2\n255\nxx").unwrap();
    let junk = dir.path().join("junk.csv");
    fs::write(&junk, "junk.ppm,1\n").unwrap();
    assert!(matches!(
        build_instance(dir.path(), &junk, 5.0, &cfg, MetricKind::Euclidean),
        Err(Error::Image { .. })
    ));

    assert!(build_instance(dir.path(), dir.path().join("absent.csv"), 5.0, &cfg, MetricKind::Euclidean).is_err());
}

fn frame_strategy() -> impl Strategy<Value = FrameImage> {
    (1u32..12, 1u32..12).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<[u8; 3]>(), (w * h) as usize)
            .prop_map(move |px| FrameImage::new(w, h, px).unwrap())
    })
}

proptest! {
    #[test]
    fn normalized_channels_sum_to_one(frame in frame_strategy(), bins in prop::sample::select(vec![1usize, 2, 8, 16, 32, 64, 256])) {
        let cfg = HistogramConfig { bins_per_channel: bins, normalize: true };
        let h = compute_histogram(&frame, &cfg).unwrap();
        prop_assert_eq!(h.len(), 3 * bins);
        for channel in h.chunks(bins) {
            prop_assert!((channel.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(channel.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn raw_counts_total_pixel_count(frame in frame_strategy()) {
        let cfg = HistogramConfig { bins_per_channel: 32, normalize: false };
        let h = compute_histogram(&frame, &cfg).unwrap();
        let n = frame.pixels().len() as f64;
        for channel in h.chunks(32) {
            prop_assert_eq!(channel.iter().sum::<f64>(), n);
        }
    }

    #[test]
    fn pixel_order_does_not_matter(frame in frame_strategy(), seed: u64) {
        let mut px = frame.pixels().to_vec();
        let len = px.len();
        let mut state = seed | 1;
        for i in (1..len).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            px.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let shuffled = FrameImage::new(frame.width(), frame.height(), px).unwrap();
        let cfg = HistogramConfig::default();
        prop_assert_eq!(compute_histogram(&frame, &cfg).unwrap(), compute_histogram(&shuffled, &cfg).unwrap());
    }
}
