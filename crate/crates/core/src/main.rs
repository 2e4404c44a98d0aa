fn main() {
    std::process::exit(psifrac::cli::run_command(std::env::args_os()));
}
