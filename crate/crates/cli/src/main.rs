use std::process::ExitCode;

use clap::Parser;

use dct_cli::{run, Cli, Status};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                Status::Error as u8
            } else {
                0
            });
        }
    };
    let result = match cli.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new()
            .num_threads(n.into())
            .build()
        {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => {
                eprintln!("ERROR --jobs cannot start worker pool: {e}");
                return ExitCode::from(Status::Error as u8);
            }
        },
        None => run(&cli),
    };
    let status = result.unwrap_or_else(|failure| {
        eprintln!("{failure}");
        Status::Error
    });
    ExitCode::from(status as u8)
}
