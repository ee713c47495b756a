use clap::Parser;

use apnforge_cli::cli::{run, Cli, EXIT_CONFIG};

fn main() {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if workers == 0 {
            eprintln!("error: --workers must be at least 1");
            std::process::exit(EXIT_CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
            eprintln!("error: cannot start worker pool: {e}");
            std::process::exit(EXIT_CONFIG);
        }
    }
    let code = run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
