fn main() {
    std::process::exit(ocb_cli::run(std::env::args_os()));
}
