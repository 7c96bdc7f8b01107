fn main() {
    std::process::exit(apcorr::cli::run(std::env::args_os()));
}
