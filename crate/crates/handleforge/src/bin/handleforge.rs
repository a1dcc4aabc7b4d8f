fn main() {
    std::process::exit(handleforge::cli::run(std::env::args_os()));
}
