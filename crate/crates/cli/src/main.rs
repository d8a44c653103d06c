fn main() {
    std::process::exit(mcrelax_cli::run_cli(std::env::args_os()));
}
