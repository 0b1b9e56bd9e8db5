fn main() {
    std::process::exit(horonet::cli::run(std::env::args_os()));
}
