fn main() {
    std::process::exit(efcp::cli::run_command(std::env::args_os()));
}
