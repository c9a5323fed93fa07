use std::net::SocketAddr;
use std::process::ExitCode;

use clap::Parser;
use spinbasis::api::ApiEnvelope;
use spinbasis_cli::args::{Cli, Command};
use spinbasis_cli::{dispatch, http, render};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Serve(s) = &cli.command {
        return serve(SocketAddr::new(s.bind, s.port));
    }
    let (command, env) = match cli.to_request().expect("serve was handled above") {
        Ok((command, options)) => (command, dispatch(command, options)),
        Err(e) => ("", ApiEnvelope::failure(&e)),
    };
    let text = if cli.json {
        env.to_json() + "\n"
    } else {
        render::render(command, &env)
    };
    if env.ok || cli.json {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
    ExitCode::from(env.exit_code() as u8)
}

fn serve(addr: SocketAddr) -> ExitCode {
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: cannot start runtime: {e}");
            return ExitCode::from(1);
        }
    };
    eprintln!("listening on http://{addr}");
    match runtime.block_on(http::serve(addr)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
