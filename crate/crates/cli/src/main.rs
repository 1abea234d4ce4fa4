fn main() {
    std::process::exit(polyzeta_cli::run(std::env::args_os()));
}
