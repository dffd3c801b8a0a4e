fn main() {
    std::process::exit(tcm_cli::run(std::env::args_os()));
}
