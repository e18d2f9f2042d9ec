//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ckmetrics::frontend::{lower_to_model, parse_source};
use ckmetrics::metrics::{compute_all, lcom, Metric};
use ckmetrics::model::{validate_model, CallTarget, ClassInfo, ClassModel, FieldInfo, MethodInfo};
use ckmetrics::report::{attribute_label, level_label, Locale};
use ckmetrics::rules::{default_rule_base, filter_by_ranges, forward_chain, paper_rule_preset, Condition, Fact};
use ckmetrics::table::{load_project_metrics, parse_metrics_table};
use ckmetrics::versions::{compare_versions, load_versions, DirectionTable, VersionNaming};

type Outcome = Result<String, String>;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).display().to_string()
}

fn cli(args: &[&str]) -> (i32, Vec<u8>, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ckm").chain(args.iter().copied());
    let code = ckmetrics_cli::run(argv, &mut out, &mut err);
    (code, out, err)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Version comparison over the five-release means table.
fn criterion_1() -> Outcome {
    let versions = fixture("versions.csv");
    let records = load_versions(&[&versions], None, &VersionNaming::turkish()).map_err(|e| e.to_string())?;
    let verdicts = compare_versions(&records, &[Metric::Wmc], DirectionTable::default()).map_err(|e| e.to_string())?;
    let wmc = &verdicts[0];
    check(wmc.min_versions == ["SÜRÜM-5"] && wmc.min_value == 0.0, || format!("min {:?} {}", wmc.min_versions, wmc.min_value))?;
    check(
        wmc.max_versions == ["SÜRÜM-2", "SÜRÜM-3"] && wmc.max_value == 5.0,
        || format!("max {:?} {}", wmc.max_versions, wmc.max_value),
    )?;

    let (code, out, err) = cli(&["compare", &versions, "--metrics", "WMC", "--locale", "tr"]);
    check(code == 0, || format!("exit {code}: {}", String::from_utf8_lossy(&err)))?;
    let golden = fs::read_to_string(fixtures().join("golden/compare_wmc_tr.txt")).map_err(|e| e.to_string())?;
    let text = String::from_utf8(out).map_err(|e| e.to_string())?;
    check(text == golden, || format!("text differs from golden:\n{text}"))?;
    Ok("min {SÜRÜM-5}=0, max {SÜRÜM-2, SÜRÜM-3}=5, golden text identical".into())
}

/// The three example rules, as printed: (metric, value, [(attribute label, level label)]).
type Labels = [(&'static str, &'static str); 8];

const RULE_EXAMPLES: [(Metric, f64, Labels); 3] = [
    (
        Metric::Dit,
        5.0,
        [
            ("Kalıtım Ağacının Derinliği", "İstenen Aralıkta"),
            ("Kod Hata Olma İhtimali", "Düşük"),
            ("Bakım, Onarım ve Test Faaliyetleri", "Az"),
            ("Kalite Düzeyi", "Yüksek"),
            ("Anlaşılabilirlik", "Yüksek"),
            ("Test Edilebilirlik", "Yüksek"),
            ("Yeniden Kullanılabilirlik", "Yüksek"),
            ("Karmaşıklık", "Düşük"),
        ],
    ),
    (
        Metric::Wmc,
        18.0,
        [
            ("Sınıflardaki Metot Sayısı", "Yüksek"),
            ("Kod Hata Olma İhtimali", "Yüksek"),
            ("Bakım, Onarım ve Test Faaliyetleri", "Çok"),
            ("Kalite Düzeyi", "Düşük"),
            ("Anlaşılabilirlik", "Düşük"),
            ("Dayanıklılık", "Düşük"),
            ("Yeniden Kullanılabilirlik", "Düşük"),
            ("Karmaşıklık", "Yüksek"),
        ],
    ),
    (
        Metric::Cbo,
        1.0,
        [
            ("Bağımlılık Düzeyi", "Çok Düşük"),
            ("Modüler Tasarım", "Çok Düşük"),
            ("Kod Hata Olma İhtimali", "Çok Düşük"),
            ("Bakım, Onarım ve Test Faaliyetleri", "Çok Az"),
            ("Kalite Düzeyi", "Çok Düşük"),
            ("Anlaşılabilirlik", "Yüksek"),
            ("Yeniden Kullanılabilirlik", "Çok Düşük"),
            ("Karmaşıklık", "Çok Düşük"),
        ],
    ),
];

fn criterion_2() -> Outcome {
    let kb = paper_rule_preset();
    let mut sizes = Vec::new();
    for (metric, value, expected) in RULE_EXAMPLES {
        let facts = [Fact::new(metric, value, "c")];
        let assessments = forward_chain(&facts, &kb).map_err(|e| e.to_string())?;
        let a = &assessments[0];
        check(a.fired_rules.len() == 1, || format!("{metric}={value} fired {:?}", a.fired_rules))?;
        let got: Vec<(String, String)> = a
            .derived
            .iter()
            .map(|d| {
                (
                    attribute_label(&d.attribute, Locale::Tr),
                    level_label(&d.attribute, d.level, Locale::Tr).to_string(),
                )
            })
            .collect();
        let want: Vec<(String, String)> = expected.iter().map(|(a, l)| (a.to_string(), l.to_string())).collect();
        check(got == want, || format!("{metric}={value}: got {got:?}"))?;
        sizes.push(got.len().to_string());
    }
    Ok(format!("one rule each, pairs {} match the printed table", sizes.join("/")))
}

fn criterion_3() -> Outcome {
    let kb = default_rule_base();
    check(kb.len() == 42, || format!("{} rules", kb.len()))?;
    for metric in Metric::ALL {
        for v in 0..=10_000u64 {
            let n = kb.rules().iter().filter(|r| r.metric == metric && r.condition.contains(v)).count();
            check(n == 1, || format!("{metric}={v} matches {n} rules"))?;
        }
    }
    Ok("42 rules, every value 0..=10000 of every metric matches exactly one".into())
}

fn lcom_oracle(uses: &[Vec<usize>], statics: &[bool]) -> u64 {
    let instance = |m: &Vec<usize>| -> Vec<usize> { m.iter().copied().filter(|&f| !statics[f]).collect() };
    let (mut p, mut q) = (0i64, 0i64);
    for i in 0..uses.len() {
        for j in i + 1..uses.len() {
            let a = instance(&uses[i]);
            let b = instance(&uses[j]);
            if a.iter().any(|f| b.contains(f)) {
                q += 1;
            } else {
                p += 1;
            }
        }
    }
    if p > q {
        (p - q) as u64
    } else {
        0
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1c0);
    for case in 0..500 {
        let n_fields = rng.random_range(0..=6);
        let n_methods = rng.random_range(0..=8);
        let statics: Vec<bool> = (0..n_fields).map(|_| rng.random_bool(0.2)).collect();
        let mut class = ClassInfo::new("C");
        for (f, &is_static) in statics.iter().enumerate() {
            let mut field = FieldInfo::new(format!("f{f}"));
            field.is_static = is_static;
            class.fields.push(field);
        }
        let mut uses = Vec::new();
        for m in 0..n_methods {
            let used: Vec<usize> = (0..n_fields).filter(|_| rng.random_bool(0.35)).collect();
            class
                .methods
                .push(MethodInfo::new(format!("m{m}"), 0).uses(used.iter().map(|f| format!("f{f}"))));
            uses.push(used);
        }
        let got = lcom(&class);
        let want = lcom_oracle(&uses, &statics);
        check(got == want, || format!("case {case}: lcom {got}, oracle {want}"))?;
    }
    Ok("500/500 random classes equal the pair-enumeration oracle".into())
}

fn random_model(rng: &mut ChaCha8Rng, id: usize) -> ClassModel {
    let n = rng.random_range(1..=12);
    let mut model = ClassModel::new(format!("m{id}"));
    let names: Vec<String> = (0..n).map(|i| format!("p.C{i}")).collect();
    for i in 0..n {
        let mut class = ClassInfo::new(names[i].clone());
        let roll = rng.random_range(0..10);
        if i > 0 && roll < 5 {
            class.superclass = Some(names[rng.random_range(0..i)].clone());
        } else if roll == 5 {
            class.superclass = Some("ext.Base".into());
        }
        let n_fields = rng.random_range(0..4);
        for f in 0..n_fields {
            class.fields.push(FieldInfo::new(format!("f{f}")));
        }
        let mut sigs = BTreeSet::new();
        for _ in 0..rng.random_range(0..6) {
            sigs.insert((rng.random_range(0..5), rng.random_range(0..3usize)));
        }
        for (name, arity) in sigs {
            let mut m = MethodInfo::new(format!("m{name}"), arity);
            for f in 0..n_fields {
                if rng.random_bool(0.4) {
                    m.used_fields.insert(format!("f{f}"));
                }
            }
            for _ in 0..rng.random_range(0..4) {
                let target = match rng.random_range(0..4) {
                    0 => CallTarget::unresolved("x", 0),
                    1 => CallTarget::resolved("ext.Base", "y", 1),
                    _ => CallTarget::resolved(names[rng.random_range(0..n)].clone(), format!("m{}", rng.random_range(0..5)), rng.random_range(0..3)),
                };
                m.called_methods.insert(target);
            }
            if rng.random_bool(0.3) {
                m.referenced_classes.insert(names[rng.random_range(0..n)].clone());
            }
            class.methods.push(m);
        }
        model.classes.push(class);
    }
    model.classes.push(ClassInfo::external("ext.Base"));
    model
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let models = 1000;
    for id in 0..models {
        let model = random_model(&mut rng, id);
        let diags = validate_model(&model);
        check(diags.is_empty(), || format!("model {id} invalid: {diags:?}"))?;
        let pm = compute_all(&model);
        let rec = |name: &str| pm.per_class.iter().find(|r| r.class_name == name);
        let mut edges = 0;
        for r in &pm.per_class {
            check(r.rfc >= r.wmc, || format!("model {id} {}: rfc {} < wmc {}", r.class_name, r.rfc, r.wmc))?;
        }
        for class in model.internal_classes() {
            let Some(parent) = class.superclass.as_deref().and_then(rec) else {
                continue;
            };
            edges += 1;
            let child = rec(&class.qualified_name).unwrap();
            check(child.dit == parent.dit + 1, || {
                format!("model {id}: dit({}) = {}, parent {}", child.class_name, child.dit, parent.dit)
            })?;
        }
        let noc_sum: u64 = pm.per_class.iter().map(|r| r.noc).sum();
        check(noc_sum == edges, || format!("model {id}: sum noc {noc_sum} != {edges} edges"))?;
    }
    Ok(format!("{models} random models, zero violations"))
}

fn criterion_6() -> Outcome {
    let path = fixture("classes.tsv");
    let text = fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let (pm, _) = load_project_metrics(&text, "classes").map_err(|e| e.to_string())?;
    check(pm.per_class.len() == 7, || format!("{} rows", pm.per_class.len()))?;
    let selection = [(Metric::Wmc, Condition::range(2, 5)), (Metric::Lcom, Condition::values([0, 1, 2]))];
    let filters = filter_by_ranges(&pm, &selection).map_err(|e| e.to_string())?;
    let values = |items: &[(String, u64)]| -> Vec<u64> {
        let mut v: Vec<u64> = items.iter().map(|(_, v)| *v).collect();
        v.sort();
        v
    };
    let wmc = &filters[0];
    let lcom = &filters[1];
    check(values(&wmc.in_range) == [4, 4, 4, 4, 5], || format!("WMC in {:?}", wmc.in_range))?;
    check(values(&wmc.out_of_range) == [8, 9], || format!("WMC out {:?}", wmc.out_of_range))?;
    check(values(&lcom.in_range) == [0], || format!("LCOM in {:?}", lcom.in_range))?;
    check(values(&lcom.out_of_range) == [4, 4, 4, 6, 22, 36], || format!("LCOM out {:?}", lcom.out_of_range))?;

    let (code, out, _) = cli(&["evaluate", &path, "--select", "WMC=2-5", "--select", "LCOM=0,1,2"]);
    let out = String::from_utf8_lossy(&out);
    check(code == 0 && out.contains("\nWMC: 2 - 5\n") && out.contains("\nLCOM: 0, 1, 2\n"), || out.to_string())?;
    Ok("WMC in {4,4,4,4,5} out {9,8}; LCOM in {0} out {4,4,4,6,36,22}".into())
}

fn java_files(dir: &Path, out: &mut Vec<PathBuf>) {
    let mut entries: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for p in entries {
        if p.is_dir() {
            java_files(&p, out);
        } else if p.extension().is_some_and(|e| e == "java") {
            out.push(p);
        }
    }
}

fn criterion_7() -> Outcome {
    let mut files = Vec::new();
    java_files(&fixtures().join("corpus"), &mut files);
    check(files.len() == 12, || format!("{} corpus files", files.len()))?;
    let units = files
        .iter()
        .map(|p| parse_source(&fs::read_to_string(p).unwrap(), p).map_err(|d| format!("{}", d[0])))
        .collect::<Result<Vec<_>, _>>()?;
    let model = lower_to_model(&units, "corpus").map_err(|e| e.to_string())?;
    let got = compute_all(&model);
    let expected_text = fs::read_to_string(fixtures().join("corpus_expected.csv")).map_err(|e| e.to_string())?;
    let expected = parse_metrics_table(&expected_text, "corpus").map_err(|e| e.to_string())?;
    check(got.per_class.len() == expected.per_class.len(), || {
        format!("{} classes, expected {}", got.per_class.len(), expected.per_class.len())
    })?;
    for (g, e) in got.per_class.iter().zip(&expected.per_class) {
        check(g == e, || format!("got {g:?}, expected {e:?}"))?;
    }
    Ok(format!("{} classes match the hand-derived table", got.per_class.len()))
}

fn criterion_8() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let t = |name: &str| tmp.path().join(name).display().to_string();
    let corpus = fixture("corpus");
    let classes = fixture("classes.tsv");
    let versions = fixture("versions.csv");
    let rules = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/rules/reference.json").display().to_string();

    let runs: Vec<(&str, Vec<String>, Vec<String>)> = vec![
        ("analyze", vec!["analyze".into(), corpus.clone(), "--model".into(), t("model-{}.json")], vec![t("model-{}.json")]),
        ("analyze structured", vec!["--format".into(), "structured".into(), "analyze".into(), corpus.clone()], vec![]),
        ("evaluate", vec!["evaluate".into(), classes.clone(), "--rules".into(), "default".into()], vec![]),
        (
            "evaluate structured",
            vec!["--format".into(), "structured".into(), "evaluate".into(), classes.clone(), "--scope".into(), "project".into()],
            vec![],
        ),
        ("evaluate select", vec!["evaluate".into(), classes.clone(), "--select".into(), "WMC=2-5".into()], vec![]),
        (
            "compare",
            vec!["--locale".into(), "tr".into(), "compare".into(), versions.clone(), "--chart".into(), t("chart-{}.svg")],
            vec![t("chart-{}.svg")],
        ),
        ("compare structured", vec!["--format".into(), "structured".into(), "compare".into(), versions.clone()], vec![]),
        ("rules list", vec!["rules".into(), "list".into()], vec![]),
        ("rules check", vec!["rules".into(), "check".into(), rules.clone()], vec![]),
    ];
    for (label, args, side_files) in &runs {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let args: Vec<String> = args.iter().map(|a| a.replace("{}", &run.to_string())).collect();
            let argv: Vec<&str> = args.iter().map(String::as_str).collect();
            let (code, out, err) = cli(&argv);
            check(code == 0, || format!("{label}: exit {code}: {}", String::from_utf8_lossy(&err)))?;
            let files: Vec<Vec<u8>> = side_files
                .iter()
                .map(|f| fs::read(f.replace("{}", &run.to_string())).unwrap_or_default())
                .collect();
            outputs.push((out, files));
        }
        check(outputs[0] == outputs[1], || format!("{label}: outputs differ between runs"))?;
    }
    Ok(format!("{} invocations byte-identical across two runs", runs.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("version comparison reproduces the five-release verdict", criterion_1),
        ("reference rule preset derives the three printed rules", criterion_2),
        ("default rule base is disjoint and complete", criterion_3),
        ("LCOM equals the brute-force oracle", criterion_4),
        ("metric invariants hold on generated models", criterion_5),
        ("metrics table ingestion and range filtering", criterion_6),
        ("frontend matches the hand-computed corpus table", criterion_7),
        ("CLI outputs are deterministic", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
