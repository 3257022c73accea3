fn main() {
    std::process::exit(repclass_cli::run_cli(std::env::args_os()));
}
