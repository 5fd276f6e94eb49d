use std::ffi::OsString;
use std::path::{Path, PathBuf};

use texbank_core::classify::{loocv, ConfusionMatrix};

use crate::error::{CliError, Result};
use crate::extract::FeatureTable;

#[derive(Debug, Clone)]
pub struct ClassifyReport {
    pub configuration: String,
    pub confusion: ConfusionMatrix,
    pub text: String,
    pub confusion_path: PathBuf,
    pub report_path: PathBuf,
}

/// `<out>.confusion.csv` and `<out>.report.txt`.
pub fn report_paths(out: &Path) -> (PathBuf, PathBuf) {
    let with = |suffix: &str| {
        let mut s = OsString::from(out.as_os_str());
        s.push(suffix);
        PathBuf::from(s)
    };
    (with(".confusion.csv"), with(".report.txt"))
}

/// Configuration label in the `G_f(E & FD)` style, from feature-column prefixes.
pub fn configuration_name(feature_names: &[String]) -> String {
    let mut groups: Vec<&str> = Vec::new();
    for name in feature_names {
        let group = match name.split('_').next().unwrap_or("") {
            "gabor" => "E",
            "fd" => "FD",
            "gmrf" => "GMRF",
            "glcm" => "CM",
            "rlm" => "RLM",
            _ => "X",
        };
        if !groups.contains(&group) {
            groups.push(group);
        }
    }
    if groups.first() == Some(&"E") {
        format!("G_f({})", groups.join(" & "))
    } else {
        groups.join(" & ")
    }
}

pub fn cmd_classify(features: &Path, out: &Path, configuration: Option<&str>) -> Result<ClassifyReport> {
    let table = FeatureTable::read(features)?;
    let configuration = configuration.map(String::from).unwrap_or_else(|| configuration_name(&table.names));
    let data = table.into_dataset()?;
    let confusion = loocv(&data)?;
    let text = format!("{}\n{}", confusion.render_table(&configuration), confusion.render_matrix());
    let (confusion_path, report_path) = report_paths(out);
    std::fs::write(&confusion_path, confusion.to_csv()).map_err(|e| CliError::io(&confusion_path, e))?;
    std::fs::write(&report_path, &text).map_err(|e| CliError::io(&report_path, e))?;
    Ok(ClassifyReport { configuration, confusion, text, confusion_path, report_path })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_follow_fusion_groups() {
        let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert_eq!(configuration_name(&names(&["gabor_f0_o0", "gabor_f0_o45", "fd"])), "G_f(E & FD)");
        assert_eq!(configuration_name(&names(&["gabor_f0_o0"])), "G_f(E)");
        assert_eq!(configuration_name(&names(&["glcm_asm", "rlm_sre"])), "CM & RLM");
    }

    #[test]
    fn paths_append_suffixes() {
        let (c, r) = report_paths(Path::new("out/run1"));
        assert_eq!(c, Path::new("out/run1.confusion.csv"));
        assert_eq!(r, Path::new("out/run1.report.txt"));
    }
}
