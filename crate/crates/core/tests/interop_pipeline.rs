use std::fmt::Write as _;

use vra::datamodel::{load_boxes, load_features, load_manifest, Subset};
use vra::fusion::{consolidate, fuse_mean_std};
use vra::handcrafted::{extract_video, FeatureModel};
use vra::preprocess::{build_crop_region, crop_video, read_frame_dir, CropOrder, DEFAULT_ENLARGE_FACTOR};
use vra::synth::{generate, write_dataset, SynthConfig};

/// Writes a CSV the way an external exporter would: its own header names
/// and float formatting, including exponents.
fn exporter_csv(prefix: &str, frames: usize, width: usize) -> String {
    let mut s = (0..width).map(|j| format!("{prefix}.{j:04}")).collect::<Vec<_>>().join(",");
    s.push('\n');
    for f in 0..frames {
        let row: Vec<String> = (0..width)
            .map(|j| {
                let v = ((f * 31 + j * 7) % 97) as f64 / 97.0;
                if j % 5 == 0 {
                    format!("{:e}", v * 1e-4)
                } else {
                    format!("{v:.8}")
                }
            })
            .collect();
        writeln!(s, "{}", row.join(",")).unwrap();
    }
    s
}

#[test]
fn deep_feature_files_load_and_fuse() {
    let dir = tempfile::tempdir().unwrap();
    for (name, width) in [("resnet", 2048), ("vggface", 4096)] {
        let path = dir.path().join(format!("{name}-clip.csv"));
        std::fs::write(&path, exporter_csv(name, 10, width)).unwrap();
        let m = load_features(&path).unwrap();
        assert_eq!(m.rows.dim(), (10, width));
        assert_eq!(m.video_id, format!("{name}-clip"));
        let fused = fuse_mean_std(&m).unwrap();
        assert_eq!(fused.values.len(), 2 * width);
        assert_eq!(fused.feature_names[0], format!("{name}.0000.mean"));
    }
}

#[test]
fn ragged_exporter_rows_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    let mut text = exporter_csv("resnet", 3, 2048);
    text.push_str("0.5,0.25\n");
    std::fs::write(&path, text).unwrap();
    assert!(load_features(&path).is_err());
}

#[test]
fn synthetic_media_crop_extract_fuse() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SynthConfig {
        media_videos: 2,
        frames: 4,
        ..SynthConfig::default()
    };
    let synth = generate(&cfg);
    write_dataset(&synth, dir.path()).unwrap();
    let records = load_manifest(dir.path().join("manifest_c3.csv")).unwrap();
    assert_eq!(records, synth.records(Subset::C3));

    let mut vectors = Vec::new();
    for record in &records[..2] {
        let frames = read_frame_dir(dir.path().join(&record.path)).unwrap();
        assert_eq!(frames.len(), 4);
        let boxes = load_boxes(dir.path().join("boxes").join(format!("{}.json", record.facial_id_pair))).unwrap();
        let (w, h) = frames[0].dimensions();
        let region = build_crop_region(
            &record.facial_id_pair,
            &boxes,
            DEFAULT_ENLARGE_FACTOR,
            i64::from(w),
            i64::from(h),
            CropOrder::default(),
        )
        .unwrap();
        let cropped = crop_video(&frames, &region).unwrap();
        assert!(cropped.iter().all(|f| f.dimensions() == (region.w as u32, region.h as u32)));
        for model in [FeatureModel::Brisque, FeatureModel::Gmlog] {
            let m = extract_video(&record.video_id, &cropped, model, 1).unwrap();
            assert_eq!(m.rows.dim(), (4, model.dim()));
            if model == FeatureModel::Gmlog {
                vectors.push(fuse_mean_std(&m).unwrap());
            }
        }
    }
    let data = consolidate(&vectors, &records[..2]).unwrap();
    assert_eq!(data.x.dim(), (2, 80));
}
