//! Compiles a small C program against the generated header and the static
//! library, then runs it. Skipped when no C compiler is on PATH.

use std::path::{Path, PathBuf};
use std::process::Command;

use texstage_core::dataset::{synth_texture, LabeledSample};
use texstage_core::glcm::FeatureConfig;
use texstage_core::knn::{Model, Normalization};
use texstage_core::pipeline::extract_gray;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <stdlib.h>
#include "texstage.h"

int main(int argc, char **argv) {
    TsModel *model = NULL;
    if (ts_model_load(argv[1], &model) != TS_STATUS_OK) {
        fprintf(stderr, "load: %s\n", ts_last_error_message());
        return 2;
    }
    FILE *f = fopen(argv[2], "rb");
    unsigned char *pixels = malloc(128 * 128);
    if (!f || fread(pixels, 1, 128 * 128, f) != 128 * 128) return 3;
    fclose(f);

    TsStage stage;
    TsFeatures feats;
    TsStatus st = ts_model_classify_gray(model, pixels, 128, 128, &stage, &feats);
    if (st != TS_STATUS_OK) {
        fprintf(stderr, "classify: %s\n", ts_last_error_message());
        return 4;
    }
    unsigned char flat[64] = {0};
    if (ts_model_classify_gray(model, flat, 8, 8, &stage, NULL) != TS_STATUS_UNDEFINED_CORRELATION) return 5;
    st = ts_model_classify_gray(model, pixels, 128, 128, &stage, NULL);
    printf("%d %s\n", (int)stage, ts_stage_phrase(stage));
    ts_model_free(model);
    free(pixels);
    return st == TS_STATUS_OK ? 0 : 6;
}
"#;

fn find_cc() -> Option<&'static str> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
}

fn static_lib() -> Option<PathBuf> {
    // target/<profile>/deps/<test binary> -> target/<profile>/libtexstage.a
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("libtexstage.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_and_classifies() {
    let (Some(cc), Some(lib)) = (find_cc(), static_lib()) else {
        eprintln!("skipping: no C compiler or static library");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let cfg = FeatureConfig::default();
    let samples = (0..3usize)
        .flat_map(|c| (0..4u64).map(move |s| (c, s)))
        .map(|(c, s)| {
            let x = extract_gray(&synth_texture(c, s), &cfg).unwrap();
            LabeledSample::new(format!("c{c}-{s}"), 2 * c as i64, x.features).unwrap().to_training()
        })
        .collect();
    let model = dir.path().join("m.json");
    Model::new(samples, 3, Normalization::None, cfg).unwrap().save(&model).unwrap();
    let raw = dir.path().join("img.raw");
    std::fs::write(&raw, synth_texture(1, 4321).values()).unwrap();

    let src = dir.path().join("smoke.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let bin = dir.path().join("smoke");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).arg(&model).arg(&raw).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "2 early warning");
}
