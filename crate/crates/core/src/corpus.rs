//! Translation cases on disk.
//!
//! A corpus is a directory with one subdirectory per case. Each case holds a
//! `manifest.toml` of flat `key = "value"` lines:
//!
//! ```text
//! id = "vector_add"
//! arch = "neon"
//! source = "neon.c"
//! test = "test.c"
//! bench = "bench.c"
//! native = "native.c"
//! signature = "void vector_add(const int32_t *a, const int32_t *b, int32_t *c, size_t n)"
//! ```
//!
//! Paths are relative to the case directory.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::rvv_front::parse_signature;

pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceArch {
    Neon,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseManifest {
    pub case_id: String,
    pub source_arch: SourceArch,
    pub case_dir: PathBuf,
    pub source_path: PathBuf,
    pub functional_test_path: PathBuf,
    pub perf_test_path: PathBuf,
    pub native_reference_path: PathBuf,
    pub function_signature: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedCase {
    pub manifest: CaseManifest,
    pub source_text: String,
    pub test_text: String,
    pub bench_text: String,
    pub native_text: String,
    pub warnings: Vec<String>,
}

impl ValidatedCase {
    pub fn id(&self) -> &str {
        &self.manifest.case_id
    }

    /// Name of the function to translate.
    pub fn function_name(&self) -> String {
        parse_signature(&self.manifest.function_signature)
            .map(|s| s.name)
            .expect("signature was checked during validation")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("corpus directory {0} does not exist")]
    MissingDir(PathBuf),
    #[error("no cases found in {0}")]
    NoCases(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CaseError {
    #[error("{dir}: cannot read manifest: {message}")]
    ManifestUnreadable { dir: PathBuf, message: String },
    #[error("{dir}: malformed manifest: {message}")]
    ManifestSyntax { dir: PathBuf, message: String },
    #[error("{dir}: manifest key `{key}` is missing")]
    MissingKey { dir: PathBuf, key: &'static str },
    #[error("{dir}: unsupported source architecture `{arch}`")]
    UnknownArch { dir: PathBuf, arch: String },
    #[error("case `{case}`: {role} file {path} does not exist")]
    MissingFile { case: String, role: &'static str, path: PathBuf },
    #[error("case id `{0}` appears more than once")]
    DuplicateId(String),
    #[error("case `{case}`: cannot read {path}: {message}")]
    Unreadable { case: String, path: PathBuf, message: String },
    #[error("case `{case}`: signature `{signature}` is not a valid function declarator: {message}")]
    BadSignature { case: String, signature: String, message: String },
    #[error("case `{case}`: signature `{signature}` not found in the source")]
    SignatureNotInSource { case: String, signature: String },
}

/// Cases that loaded cleanly plus one error per case that did not.
#[derive(Debug, Default)]
pub struct CorpusLoad {
    pub cases: Vec<CaseManifest>,
    pub errors: Vec<CaseError>,
}

impl fmt::Display for CorpusLoad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} cases loaded, {} rejected", self.cases.len(), self.errors.len())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    id: Option<String>,
    arch: Option<String>,
    source: Option<String>,
    test: Option<String>,
    bench: Option<String>,
    native: Option<String>,
    signature: Option<String>,
}

pub fn load_corpus(corpus_dir: &Path) -> Result<CorpusLoad, CorpusError> {
    if !corpus_dir.is_dir() {
        return Err(CorpusError::MissingDir(corpus_dir.to_path_buf()));
    }
    let entries = fs::read_dir(corpus_dir).map_err(|source| CorpusError::Io {
        path: corpus_dir.to_path_buf(),
        source,
    })?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.join(MANIFEST_FILE).is_file())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(CorpusError::NoCases(corpus_dir.to_path_buf()));
    }

    let mut load = CorpusLoad::default();
    let mut by_id: BTreeMap<String, CaseManifest> = BTreeMap::new();
    for dir in dirs {
        match read_manifest(&dir) {
            Ok(m) => {
                if by_id.contains_key(&m.case_id) {
                    load.errors.push(CaseError::DuplicateId(m.case_id));
                } else {
                    by_id.insert(m.case_id.clone(), m);
                }
            }
            Err(e) => load.errors.push(e),
        }
    }
    load.cases = by_id.into_values().collect();
    Ok(load)
}

pub fn read_manifest(dir: &Path) -> Result<CaseManifest, CaseError> {
    let text = fs::read_to_string(dir.join(MANIFEST_FILE)).map_err(|e| CaseError::ManifestUnreadable {
        dir: dir.to_path_buf(),
        message: e.to_string(),
    })?;
    let raw: RawManifest = toml::from_str(&text).map_err(|e| CaseError::ManifestSyntax {
        dir: dir.to_path_buf(),
        message: e.message().to_string(),
    })?;
    let need = |v: Option<String>, key: &'static str| {
        v.filter(|s| !s.trim().is_empty()).ok_or(CaseError::MissingKey { dir: dir.to_path_buf(), key })
    };
    let case_id = need(raw.id, "id")?;
    let arch = need(raw.arch, "arch")?;
    let source_arch = match arch.as_str() {
        "neon" => SourceArch::Neon,
        _ => return Err(CaseError::UnknownArch { dir: dir.to_path_buf(), arch }),
    };
    let file = |v: Option<String>, key: &'static str, role: &'static str| -> Result<PathBuf, CaseError> {
        let path = dir.join(need(v, key)?);
        if !path.is_file() {
            return Err(CaseError::MissingFile { case: case_id.clone(), role, path });
        }
        Ok(path)
    };
    Ok(CaseManifest {
        source_path: file(raw.source, "source", "source")?,
        functional_test_path: file(raw.test, "test", "functional test")?,
        perf_test_path: file(raw.bench, "bench", "benchmark")?,
        native_reference_path: file(raw.native, "native", "native reference")?,
        function_signature: need(raw.signature, "signature")?,
        case_id,
        source_arch,
        case_dir: dir.to_path_buf(),
    })
}

/// Reads every file of the case and runs the sanity checks. Never writes.
pub fn validate_case(manifest: &CaseManifest) -> Result<ValidatedCase, CaseError> {
    let read = |path: &Path| {
        fs::read_to_string(path).map_err(|e| CaseError::Unreadable {
            case: manifest.case_id.clone(),
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    };
    let source_text = read(&manifest.source_path)?;
    let test_text = read(&manifest.functional_test_path)?;
    let bench_text = read(&manifest.perf_test_path)?;
    let native_text = read(&manifest.native_reference_path)?;

    let signature = &manifest.function_signature;
    parse_signature(signature).map_err(|e| CaseError::BadSignature {
        case: manifest.case_id.clone(),
        signature: signature.clone(),
        message: e.to_string(),
    })?;
    if !squeeze_c(&source_text).contains(&squeeze_c(signature)) {
        return Err(CaseError::SignatureNotInSource {
            case: manifest.case_id.clone(),
            signature: signature.clone(),
        });
    }

    let mut warnings = Vec::new();
    if !identifiers(&source_text).any(is_neon_intrinsic) {
        warnings.push(format!(
            "case `{}`: source contains no Neon intrinsic (vaddq_s32-style identifier)",
            manifest.case_id
        ));
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(ValidatedCase {
        manifest: manifest.clone(),
        source_text,
        test_text,
        bench_text,
        native_text,
        warnings,
    })
}

/// Drops whitespace except where it separates two word characters, so
/// `int *a` and `int* a` compare equal.
pub fn squeeze_c(text: &str) -> String {
    let word = |c: char| c.is_ascii_alphanumeric() || c == '_';
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            pending_space = true;
            continue;
        }
        if pending_space && out.chars().last().is_some_and(word) && word(c) {
            out.push(' ');
        }
        pending_space = false;
        out.push(c);
    }
    out
}

fn identifiers(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .filter(|w| w.starts_with(|c: char| c.is_ascii_alphabetic()))
}

/// `vaddq_s32`, `vld1q_f32`, `vget_lane_u8`, `vreinterpretq_u8_s16`, ...
pub fn is_neon_intrinsic(ident: &str) -> bool {
    let mut parts = ident.split('_');
    let head = parts.next().unwrap_or_default();
    let Some(last) = parts.next_back() else {
        return false;
    };
    let head_ok = head.len() > 1
        && head.starts_with('v')
        && head[1..].chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit());
    let ty = last.trim_start_matches(|c: char| c.is_ascii_lowercase());
    let prefix = &last[..last.len() - ty.len()];
    head_ok && matches!(prefix, "s" | "u" | "f" | "p" | "bf") && !ty.is_empty() && ty.chars().all(|c| c.is_ascii_digit())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_case(root: &Path, id: &str, source: &str, skip: Option<&str>) -> PathBuf {
        let dir = root.join(id);
        fs::create_dir_all(&dir).unwrap();
        let files = [("neon.c", source), ("test.c", "int main(void){return 0;}"), ("bench.c", ""), ("native.c", "")];
        for (name, body) in files {
            if Some(name) != skip {
                fs::write(dir.join(name), body).unwrap();
            }
        }
        fs::write(
            dir.join(MANIFEST_FILE),
            format!(
                "id = \"{id}\"\narch = \"neon\"\nsource = \"neon.c\"\ntest = \"test.c\"\nbench = \"bench.c\"\nnative = \"native.c\"\nsignature = \"void {id}(int32_t *a, size_t n)\"\n"
            ),
        )
        .unwrap();
        dir
    }

    fn neon_src(id: &str) -> String {
        format!("void {id}(int32_t* a,\n    size_t n) {{ int32x4_t x = vld1q_s32(a); vst1q_s32(a, vaddq_s32(x, x)); }}\n")
    }

    #[test]
    fn loads_sorted_by_id() {
        let tmp = tempfile::tempdir().unwrap();
        for id in ["c_case", "a_case", "b_case"] {
            write_case(tmp.path(), id, &neon_src(id), None);
        }
        let load = load_corpus(tmp.path()).unwrap();
        let ids: Vec<_> = load.cases.iter().map(|c| c.case_id.as_str()).collect();
        assert_eq!(ids, ["a_case", "b_case", "c_case"]);
        assert!(load.errors.is_empty());
        assert_eq!(load_corpus(tmp.path()).unwrap().cases, load.cases);
    }

    #[test]
    fn missing_file_is_recorded() {
        let tmp = tempfile::tempdir().unwrap();
        write_case(tmp.path(), "good", &neon_src("good"), None);
        write_case(tmp.path(), "bad", &neon_src("bad"), Some("neon.c"));
        let load = load_corpus(tmp.path()).unwrap();
        assert_eq!(load.cases.len(), 1);
        assert!(matches!(&load.errors[..], [CaseError::MissingFile { case, role: "source", .. }] if case == "bad"));
    }

    #[test]
    fn empty_directory_has_no_cases() {
        let tmp = tempfile::tempdir().unwrap();
        assert!(matches!(load_corpus(tmp.path()), Err(CorpusError::NoCases(_))));
    }

    #[test]
    fn malformed_manifest_is_recorded() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = write_case(tmp.path(), "x", &neon_src("x"), None);
        fs::write(dir.join(MANIFEST_FILE), "id = \"x\"\nsource = \n").unwrap();
        let load = load_corpus(tmp.path()).unwrap();
        assert!(matches!(&load.errors[..], [CaseError::ManifestSyntax { .. }]));
    }

    #[test]
    fn validates_with_loose_whitespace() {
        let tmp = tempfile::tempdir().unwrap();
        write_case(tmp.path(), "k", &neon_src("k"), None);
        let load = load_corpus(tmp.path()).unwrap();
        let case = validate_case(&load.cases[0]).unwrap();
        assert!(case.warnings.is_empty());
        assert_eq!(case.function_name(), "k");
    }

    #[test]
    fn scalar_source_warns_but_validates() {
        let tmp = tempfile::tempdir().unwrap();
        write_case(tmp.path(), "s", "void s(int32_t *a, size_t n) { a[0] += 1; }", None);
        let case = validate_case(&load_corpus(tmp.path()).unwrap().cases[0]).unwrap();
        assert_eq!(case.warnings.len(), 1);
    }

    #[test]
    fn absent_signature_is_named() {
        let tmp = tempfile::tempdir().unwrap();
        write_case(tmp.path(), "m", "void other(int32_t *a, size_t n) { vaddq_s32; }", None);
        let err = validate_case(&load_corpus(tmp.path()).unwrap().cases[0]).unwrap_err();
        assert!(err.to_string().contains("void m(int32_t *a, size_t n)"), "{err}");
    }

    #[test]
    fn neon_identifier_shapes() {
        for yes in ["vaddq_s32", "vld1q_f32", "vget_lane_u8", "vreinterpretq_u8_s16", "vqaddq_u8", "vmull_p8"] {
            assert!(is_neon_intrinsic(yes), "{yes}");
        }
        for no in ["vl", "vector_add", "size_t", "v_x", "__riscv_vadd_vv_i32m1", "vint32m1_t"] {
            assert!(!is_neon_intrinsic(no), "{no}");
        }
    }
}
