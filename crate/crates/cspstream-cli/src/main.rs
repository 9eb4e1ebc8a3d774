use std::process;

fn main() {
    process::exit(cspstream_cli::cli::main_entry(std::env::args_os()));
}
