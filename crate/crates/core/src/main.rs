fn main() {
    std::process::exit(sck::harness::cli::cli(std::env::args_os()));
}
