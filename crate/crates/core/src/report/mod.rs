//! Plain-text reports in English or Turkish, structured export and charts.

use std::fmt;
use std::str::FromStr;

use crate::metrics::format_value;
use crate::rules::{Assessment, Level, RangeFilter, PROJECT_SCOPE};
use crate::versions::{VersionNaming, VersionVerdict};

pub mod chart;
pub mod export;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Locale {
    #[default]
    En,
    Tr,
}

impl Locale {
    pub fn as_str(self) -> &'static str {
        match self {
            Locale::En => "en",
            Locale::Tr => "tr",
        }
    }

    pub fn version_naming(self) -> VersionNaming {
        match self {
            Locale::En => VersionNaming::english(),
            Locale::Tr => VersionNaming::turkish(),
        }
    }

    /// Upper-cases with the dotted/dotless i rules of the locale.
    pub fn uppercase(self, text: &str) -> String {
        match self {
            Locale::En => text.to_uppercase(),
            Locale::Tr => text
                .chars()
                .map(|c| match c {
                    'i' => "İ".to_string(),
                    'ı' => "I".to_string(),
                    c => c.to_uppercase().collect(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for Locale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Locale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "en" => Ok(Locale::En),
            "tr" => Ok(Locale::Tr),
            other => Err(format!("unknown locale `{other}` (expected en or tr)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Line {
    KeyValue(String, String),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub heading: String,
    pub lines: Vec<Line>,
}

impl Section {
    pub fn new(heading: impl Into<String>) -> Self {
        Section {
            heading: heading.into(),
            lines: Vec::new(),
        }
    }

    pub fn kv(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.lines.push(Line::KeyValue(key.into(), value.into()));
        self
    }

    pub fn text(mut self, text: impl Into<String>) -> Self {
        self.lines.push(Line::Text(text.into()));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub sections: Vec<Section>,
    pub locale: Locale,
}

impl Report {
    pub fn new(title: impl Into<String>, locale: Locale) -> Self {
        Report {
            title: title.into(),
            sections: Vec::new(),
            locale,
        }
    }
}

/// Title, then each section after a blank line: the upper-cased heading
/// and its lines indented by one space, key and value joined by ` : `.
pub fn render_text(report: &Report) -> String {
    let upper = |s: &str| report.locale.uppercase(s);
    let mut out = upper(&report.title);
    out.push('\n');
    for section in &report.sections {
        out.push('\n');
        out.push_str(&upper(&section.heading));
        out.push('\n');
        for line in &section.lines {
            out.push(' ');
            match line {
                Line::KeyValue(k, v) => {
                    out.push_str(k);
                    out.push_str(" : ");
                    out.push_str(v);
                }
                Line::Text(t) => out.push_str(t),
            }
            out.push('\n');
        }
    }
    out
}

fn title(locale: Locale) -> &'static str {
    match locale {
        Locale::En => "EVALUATION RESULTS",
        Locale::Tr => "DEĞERLENDİRME SONUÇLARI",
    }
}

/// `A`, `A ve B`, `A, B ve C` (and `and` in English).
pub fn join_names(names: &[String], locale: Locale) -> String {
    let and = match locale {
        Locale::En => "and",
        Locale::Tr => "ve",
    };
    match names {
        [] => "-".to_string(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} {and} {last}", init.join(", ")),
    }
}

fn space_joined(names: &[String]) -> String {
    if names.is_empty() {
        "-".into()
    } else {
        names.join(" ")
    }
}

/// One section per compared metric.
pub fn verdict_report(verdicts: &[VersionVerdict], locale: Locale) -> Report {
    let mut report = Report::new(title(locale), locale);
    for v in verdicts {
        let m = v.metric.as_str();
        let min = format!("{} ({})", join_names(&v.min_versions, locale), format_value(v.min_value));
        let max = format!("{} ({})", join_names(&v.max_versions, locale), format_value(v.max_value));
        let i = &v.interpretation;
        let section = match locale {
            Locale::Tr => Section::new(format!("ELDE EDİLEN BULGULAR {m} METRİĞİ AÇISINDAN İNCELENDİĞİNDE,"))
                .kv("EN KÜÇÜK değere sahip sürüm/ler", min)
                .kv("EN BÜYÜK değere sahip sürüm/ler", max)
                .text("Kod Kalitesi Bakımından;")
                .kv(join_names(&i.quality_worst, locale), "En Karışık ve En Düşük")
                .kv(join_names(&i.quality_best, locale), "En Az Karışık ve En Yüksek")
                .text("Geliştirilmesi, Bakım-Onarımı ve Test Faaliyetleri Bakımından Harcanak Zaman ve İş Gücü;")
                .kv(space_joined(&i.effort_most), "En Çok")
                .kv(space_joined(&i.effort_least), "En Az"),
            Locale::En => Section::new(format!("WHEN THE FINDINGS ARE EXAMINED FOR THE {m} METRIC,"))
                .kv("SMALLEST value version(s)", min)
                .kv("LARGEST value version(s)", max)
                .text("In terms of code quality;")
                .kv(join_names(&i.quality_worst, locale), "Most Complex and Lowest")
                .kv(join_names(&i.quality_best, locale), "Least Complex and Highest")
                .text("Time and effort spent on development, maintenance and testing;")
                .kv(space_joined(&i.effort_most), "Most")
                .kv(space_joined(&i.effort_least), "Least"),
        };
        report.sections.push(section);
    }
    report
}

pub fn attribute_label(attribute: &str, locale: Locale) -> String {
    let (en, tr) = match attribute {
        "complexity" => ("Complexity", "Karmaşıklık"),
        "understandability" => ("Understandability", "Anlaşılabilirlik"),
        "testability" => ("Testability", "Test Edilebilirlik"),
        "reusability" => ("Reusability", "Yeniden Kullanılabilirlik"),
        "robustness" => ("Robustness", "Dayanıklılık"),
        "faultLikelihood" => ("Fault Likelihood", "Kod Hata Olma İhtimali"),
        "maintenanceEffort" => ("Maintenance, Repair and Test Effort", "Bakım, Onarım ve Test Faaliyetleri"),
        "quality" => ("Quality Level", "Kalite Düzeyi"),
        "coupling" => ("Coupling Level", "Bağımlılık Düzeyi"),
        "modularDesign" => ("Modular Design", "Modüler Tasarım"),
        "inheritanceDepth" => ("Inheritance Tree Depth", "Kalıtım Ağacının Derinliği"),
        "methodCount" => ("Methods per Class", "Sınıflardaki Metot Sayısı"),
        other => return other.to_string(),
    };
    match locale {
        Locale::En => en,
        Locale::Tr => tr,
    }
    .to_string()
}

pub fn level_label(attribute: &str, level: Level, locale: Locale) -> &'static str {
    use Level::*;
    match (locale, attribute, level) {
        (Locale::En, "inheritanceDepth", Normal) => "In Desired Range",
        (Locale::Tr, "inheritanceDepth", Normal) => "İstenen Aralıkta",
        (Locale::En, "maintenanceEffort", l) => match l {
            VeryLow => "Very Little",
            Low => "Little",
            Normal => "Normal",
            High => "Much",
            VeryHigh => "Very Much",
        },
        (Locale::Tr, "maintenanceEffort", l) => match l {
            VeryLow => "Çok Az",
            Low => "Az",
            Normal => "Normal",
            High => "Çok",
            VeryHigh => "Çok Fazla",
        },
        (Locale::En, _, l) => match l {
            VeryLow => "Very Low",
            Low => "Low",
            Normal => "Normal",
            High => "High",
            VeryHigh => "Very High",
        },
        (Locale::Tr, _, l) => match l {
            VeryLow => "Çok Düşük",
            Low => "Düşük",
            Normal => "Normal",
            High => "Yüksek",
            VeryHigh => "Çok Yüksek",
        },
    }
}

/// One section per assessed scope: the facts with the rule each fired,
/// then the derived attribute levels.
pub fn assessment_report(assessments: &[Assessment], locale: Locale) -> Report {
    let mut report = Report::new(title(locale), locale);
    let no_rule = match locale {
        Locale::En => "no matching rule",
        Locale::Tr => "eşleşen kural yok",
    };
    for a in assessments {
        let heading = match (a.scope.as_str(), locale) {
            (PROJECT_SCOPE, Locale::En) => "PROJECT".to_string(),
            (PROJECT_SCOPE, Locale::Tr) => "PROJE".to_string(),
            (scope, _) => scope.to_string(),
        };
        let mut section = Section::new(heading);
        for f in &a.facts {
            let rule = f.rule_id.as_deref().unwrap_or(no_rule);
            section = section.kv(f.metric.as_str(), format!("{} [{rule}]", format_value(f.value)));
        }
        for d in &a.derived {
            section = section.kv(
                attribute_label(&d.attribute, locale),
                level_label(&d.attribute, d.level, locale),
            );
        }
        report.sections.push(section);
    }
    report
}

fn class_list(items: &[(String, u64)]) -> String {
    if items.is_empty() {
        return "-".into();
    }
    items
        .iter()
        .map(|(c, v)| format!("{c} ({v})"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Classes inside and outside each selected range, headed like `WMC: 2 - 5`.
pub fn filter_report(filters: &[RangeFilter], locale: Locale) -> Report {
    let mut report = Report::new(title(locale), locale);
    let (inside, outside) = match locale {
        Locale::En => ("In range", "Out of range"),
        Locale::Tr => ("Aralıkta", "Aralık dışında"),
    };
    for f in filters {
        report.sections.push(
            Section::new(format!("{}: {}", f.metric, f.condition))
                .kv(inside, class_list(&f.in_range))
                .kv(outside, class_list(&f.out_of_range)),
        );
    }
    report
}
