fn main() {
    std::process::exit(tubeap::cli::dispatch(std::env::args_os()));
}
