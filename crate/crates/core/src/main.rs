fn main() {
    std::process::exit(bhgeo::cli::run(std::env::args_os()));
}
