fn main() {
    std::process::exit(beamplan::cli::run(std::env::args_os()));
}
