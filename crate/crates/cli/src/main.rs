fn main() {
    std::process::exit(naqc_cli::run(std::env::args_os()));
}
