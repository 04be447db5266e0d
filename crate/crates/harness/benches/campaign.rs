use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sonomorph_backend::Execution;
use sonomorph_harness::{Campaign, CampaignConfig};

/// The shipped desk campaign end to end: seed filtering, perturbation,
/// artifact writes and spotter queries.
fn campaign_fan_out(c: &mut Criterion) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets/desk/campaign.json");
    let (config, base) = CampaignConfig::load(&path).unwrap();
    let mut campaign = Campaign::prepare(config, base).unwrap();
    let out = tempfile::tempdir().unwrap();

    let mut group = c.benchmark_group("campaign_fan_out");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel { workers: 4 }] {
        let label = match exec {
            Execution::Sequential => "sequential".to_string(),
            Execution::Parallel { workers } => format!("parallel_{workers}"),
        };
        campaign.exec = exec;
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| {
                // Fresh directory each time so artifact writes are measured.
                let dir = tempfile::tempdir_in(out.path()).unwrap();
                campaign.run(dir.path()).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, campaign_fan_out);
criterion_main!(benches);
