fn main() {
    std::process::exit(spectrascope_cli::run(std::env::args_os()));
}
