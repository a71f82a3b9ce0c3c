use std::path::Path;

use peacekit::graph::random_regular;
use peacekit::oracle::min_peacefulness_exact;
use peacekit::rng::split_seed;
use peacekit::{peace_report, Graph, LogBase, PartialColouring};
use peacekit_cli::algos::{self, AlgoParams};
use peacekit_cli::sweep::{colouring_path, recheck, run_experiment, ExperimentConfig, Row};

fn rows(out: &Path) -> Vec<Row> {
    csv::Reader::from_path(out.join("results.csv"))
        .unwrap()
        .deserialize()
        .map(Result::unwrap)
        .collect()
}

fn snapshot(out: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(out.join("cells"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.push(out.join("results.csv"));
    files.sort();
    files
        .into_iter()
        .map(|p| (p.display().to_string(), std::fs::read(&p).unwrap()))
        .collect()
}

#[test]
fn single_cell_on_k5() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig::from_toml(
        "[[cells]]\nfamily = \"complete\"\ndelta = 4\nalgorithm = \"oneshot\"\n[cells.params]\nmu = \"1\"\n",
    )
    .unwrap();
    let s = run_experiment(&config, dir.path(), None).unwrap();
    assert_eq!((s.cells, s.ran, s.failed), (1, 1, 0));
    let rows = rows(dir.path());
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!((r.n, r.delta, r.status.as_str()), (Some(5), Some(4), "ok"));
    // Every vertex of K5 sees all other colours once, so nothing is disturbed.
    assert_eq!(r.colours_used, Some(5));
    assert_eq!(r.peacefulness, Some(0));
    assert_eq!(r.codegree_max, Some(3));
}

#[test]
fn rerun_is_byte_identical_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig::from_toml(
        "seed = 9\n[[cells]]\nfamily = \"regular\"\nn = 60\ndelta = 6\nalgorithm = [\"greedy\", \"oneshot\"]\nseeds = 2\n",
    )
    .unwrap();
    let first = run_experiment(&config, dir.path(), Some(&[0, 3])).unwrap();
    assert_eq!((first.ran, first.skipped), (2, 0));
    assert_eq!(rows(dir.path()).len(), 2);
    let rest = run_experiment(&config, dir.path(), None).unwrap();
    assert_eq!((rest.ran, rest.skipped), (2, 2));
    let before = snapshot(dir.path());
    let again = run_experiment(&config, dir.path(), None).unwrap();
    assert_eq!((again.ran, again.skipped), (0, 4));
    // Runtimes live in the records, so an unchanged snapshot means nothing re-ran.
    assert_eq!(before, snapshot(dir.path()));

    let fresh = tempfile::tempdir().unwrap();
    run_experiment(&config, fresh.path(), None).unwrap();
    for (a, b) in rows(dir.path()).iter().zip(rows(fresh.path())) {
        assert_eq!(
            (a.colours_used, a.peacefulness, a.unique_mean),
            (b.colours_used, b.peacefulness, b.unique_mean)
        );
    }
}

#[test]
fn thirty_cells_match_standalone_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig::from_toml(
        "seed = 5\n[[cells]]\nfamily = \"regular\"\nn = 80\ndelta = [6, 10]\nalgorithm = [\"greedy\", \"dsatur\", \"oneshot\"]\nseeds = 5\n",
    )
    .unwrap();
    let s = run_experiment(&config, dir.path(), None).unwrap();
    assert_eq!((s.cells, s.failed), (30, 0));
    let rows = rows(dir.path());
    assert_eq!(rows.len(), 30);
    for (cell, row) in config.expand().iter().zip(&rows) {
        assert_eq!(row.algorithm, cell.algorithm.name());
        assert_eq!(row.seed, cell.seed);
        // Rebuild the graph and rerun the algorithm outside the sweep.
        let g = random_regular(80, cell.delta.unwrap(), split_seed(5, cell.seed)).unwrap();
        let run = algos::run(
            &g,
            cell.algorithm,
            &AlgoParams::default(),
            cell.algorithm_seed(5),
            LogBase::Natural,
        )
        .unwrap();
        let report = peace_report(&g, &run.colouring).unwrap();
        assert_eq!(row.peacefulness, Some(report.peacefulness), "cell {}", cell.index);
        assert_eq!(row.colours_used, Some(run.colouring.colours_used()));
        assert_eq!(row.unique_mean, Some(report.unique_fraction_mean()));
        let saved = PartialColouring::load(colouring_path(dir.path(), cell.index)).unwrap();
        assert_eq!(saved, run.colouring);
    }
    assert!(recheck(&config, dir.path()).unwrap().is_empty());
}

#[test]
fn failures_become_rows() {
    let dir = tempfile::tempdir().unwrap();
    // n * delta odd has no regular graph; the second group is fine.
    let config = ExperimentConfig::from_toml(
        "[[cells]]\nfamily = \"regular\"\nn = 11\ndelta = 3\nalgorithm = \"greedy\"\n\
         [[cells]]\nfamily = \"cycle\"\nn = 7\nalgorithm = \"oracle\"\n",
    )
    .unwrap();
    let s = run_experiment(&config, dir.path(), None).unwrap();
    assert_eq!((s.cells, s.failed), (2, 1));
    let rows = rows(dir.path());
    assert!(rows[0].status.starts_with("error"), "{}", rows[0].status);
    assert_eq!(rows[0].peacefulness, None);
    assert_eq!(rows[1].status, "ok");
    let exact = min_peacefulness_exact(&Graph::cycle(7), 3).unwrap();
    assert_eq!(rows[1].peacefulness, Some(exact.p_star));
    assert_eq!(rows[1].colours_used, Some(3));
}

#[test]
fn recheck_flags_a_tampered_colouring() {
    let dir = tempfile::tempdir().unwrap();
    let config =
        ExperimentConfig::from_toml("[[cells]]\nfamily = \"petersen\"\nalgorithm = \"greedy\"\n").unwrap();
    run_experiment(&config, dir.path(), None).unwrap();
    assert!(recheck(&config, dir.path()).unwrap().is_empty());
    let path = colouring_path(dir.path(), 0);
    let mut f = PartialColouring::load(&path).unwrap();
    f.unset(0);
    f.save(&path).unwrap();
    assert_eq!(recheck(&config, dir.path()).unwrap(), vec![0]);
}
